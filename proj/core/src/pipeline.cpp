#include "claimnet/pipeline.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "claimnet/cluster_builder.hpp"
#include "claimnet/io.hpp"
#include "claimnet/parallel.hpp"

namespace claimnet {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

StageError::StageError(std::string stage, const Error& cause)
    : Error(cause.kind(), "stage '" + stage + "' failed: " + cause.what(), cause.details()),
      stage_(std::move(stage)) {}

// --- config -----------------------------------------------------------------

namespace {

[[noreturn]] void bad_config(const std::string& source, const std::string& message) {
  throw Error(ErrorKind::Validation, source + ": " + message);
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known,
                    const std::string& source, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      bad_config(source, "unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void take(const json& j, const char* key, T& out, const std::string& source) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    bad_config(source, std::string("bad value for '") + key + "'");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

const json& object_at(const json& j, const char* key, const std::string& source) {
  static const json empty = json::object();
  auto it = j.find(key);
  if (it == j.end()) return empty;
  if (!it->is_object()) bad_config(source, std::string("'") + key + "' must be an object");
  return *it;
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text, const fs::path& base_dir,
                           const std::string& source) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, source + ": " + e.what());
  }
  if (!j.is_object()) bad_config(source, "config must be a JSON object");
  reject_unknown(j,
                 {"claims", "embeddings", "out_dir", "seed", "threads", "params", "hnsw",
                  "ann_cluster_threshold", "annotators", "agglomerative", "affinity",
                  "reuse_index_cache"},
                 source, "config");

  RunConfig c;
  std::string s;
  if (take(j, "claims", s, source), !s.empty()) c.claims = resolve(base_dir, s);
  s.clear();
  if (take(j, "embeddings", s, source), !s.empty()) c.embeddings = resolve(base_dir, s);
  s.clear();
  if (take(j, "out_dir", s, source), !s.empty()) c.out_dir = resolve(base_dir, s);
  take(j, "seed", c.seed, source);
  take(j, "threads", c.threads, source);
  take(j, "ann_cluster_threshold", c.ann_cluster_threshold, source);
  take(j, "reuse_index_cache", c.reuse_index_cache, source);

  const json& p = object_at(j, "params", source);
  reject_unknown(p,
                 {"knn_candidates", "merge_top_k", "merge_sim_threshold", "consensus",
                  "merge_passes"},
                 source, "params");
  take(p, "knn_candidates", c.params.knn_candidates, source);
  take(p, "merge_top_k", c.params.merge_top_k, source);
  take(p, "merge_sim_threshold", c.params.merge_sim_threshold, source);
  take(p, "merge_passes", c.params.merge_passes, source);
  if (p.contains("consensus")) {
    std::string policy;
    take(p, "consensus", policy, source);
    auto parsed = parse_policy(policy);
    if (!parsed) bad_config(source, "consensus must be \"unanimous\" or \"majority\"");
    c.params.consensus = *parsed;
  }

  const json& h = object_at(j, "hnsw", source);
  reject_unknown(h, {"M", "ef_construction", "ef_search"}, source, "hnsw");
  take(h, "M", c.hnsw.M, source);
  take(h, "ef_construction", c.hnsw.ef_construction, source);
  take(h, "ef_search", c.hnsw.ef_search, source);

  if (auto it = j.find("annotators"); it != j.end()) {
    if (!it->is_array()) bad_config(source, "'annotators' must be an array");
    for (const auto& a : *it) {
      if (!a.is_object()) bad_config(source, "annotator entries must be objects");
      reject_unknown(a, {"name", "kind", "partition", "prefix"}, source, "annotator");
      AnnotatorConfig ac;
      take(a, "name", ac.name, source);
      take(a, "kind", ac.kind, source);
      std::string part;
      take(a, "partition", part, source);
      ac.partition = resolve(base_dir, part);
      std::string prefix;
      take(a, "prefix", prefix, source);
      ac.prefix = prefix.empty() ? prefix : resolve(base_dir, prefix).string();
      c.annotators.push_back(std::move(ac));
    }
  }

  const json& ag = object_at(j, "agglomerative", source);
  reject_unknown(ag, {"linkage", "distance_threshold", "metric"}, source, "agglomerative");
  if (ag.contains("linkage")) {
    std::string v;
    take(ag, "linkage", v, source);
    auto parsed = parse_linkage(v);
    if (!parsed) bad_config(source, "unknown linkage '" + v + "'");
    c.agglomerative.linkage = *parsed;
  }
  if (ag.contains("metric")) {
    std::string v;
    take(ag, "metric", v, source);
    auto parsed = parse_metric(v);
    if (!parsed) bad_config(source, "unknown metric '" + v + "'");
    c.agglomerative.metric = *parsed;
  }
  take(ag, "distance_threshold", c.agglomerative.distance_threshold, source);

  const json& ap = object_at(j, "affinity", source);
  reject_unknown(ap, {"damping", "preference", "max_iterations", "convergence_window"}, source,
                 "affinity");
  take(ap, "damping", c.affinity.damping, source);
  take(ap, "max_iterations", c.affinity.max_iterations, source);
  take(ap, "convergence_window", c.affinity.convergence_window, source);
  if (auto it = ap.find("preference"); it != ap.end() && !it->is_null()) {
    double pref = 0.0;
    take(ap, "preference", pref, source);
    c.affinity.preference = pref;
  }
  return c;
}

RunConfig read_run_config(const fs::path& file) {
  return parse_run_config(io::read_text(file), file.parent_path(), file.string());
}

namespace {

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["claims"] = c.claims.string();
  j["embeddings"] = c.embeddings.string();
  j["out_dir"] = c.out_dir.string();
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  ordered_json p;
  p["knn_candidates"] = c.params.knn_candidates;
  p["merge_top_k"] = c.params.merge_top_k;
  p["merge_sim_threshold"] = c.params.merge_sim_threshold;
  p["consensus"] = to_string(c.params.consensus);
  p["merge_passes"] = c.params.merge_passes;
  j["params"] = p;
  ordered_json h;
  h["M"] = c.hnsw.M;
  h["ef_construction"] = c.hnsw.ef_construction;
  h["ef_search"] = c.hnsw.ef_search;
  j["hnsw"] = h;
  j["ann_cluster_threshold"] = c.ann_cluster_threshold;
  j["reuse_index_cache"] = c.reuse_index_cache;
  ordered_json annotators = ordered_json::array();
  for (const auto& a : c.annotators) {
    ordered_json e;
    e["name"] = a.name;
    e["kind"] = a.kind;
    if (!a.partition.empty()) e["partition"] = a.partition.string();
    if (!a.prefix.empty()) e["prefix"] = a.prefix;
    annotators.push_back(e);
  }
  j["annotators"] = annotators;
  ordered_json ag;
  ag["linkage"] = to_string(c.agglomerative.linkage);
  ag["distance_threshold"] = c.agglomerative.distance_threshold;
  ag["metric"] = to_string(c.agglomerative.metric);
  j["agglomerative"] = ag;
  ordered_json ap;
  ap["damping"] = c.affinity.damping;
  ap["preference"] = c.affinity.preference ? ordered_json(*c.affinity.preference) : ordered_json();
  ap["max_iterations"] = c.affinity.max_iterations;
  ap["convergence_window"] = c.affinity.convergence_window;
  j["affinity"] = ap;
  return j;
}

}  // namespace

std::string to_json(const RunConfig& config) { return config_json(config).dump(2) + "\n"; }

// --- inputs -----------------------------------------------------------------

std::vector<AnnotatorSpec> make_annotators(std::span<const AnnotatorConfig> configs) {
  std::vector<AnnotatorSpec> out;
  for (const auto& c : configs) {
    if (c.kind == "oracle") {
      if (c.partition.empty()) {
        throw Error(ErrorKind::Validation, "oracle annotator '" + c.name + "' needs a partition");
      }
      out.push_back({c.name, OracleAnnotator{io::read_partition(c.partition)}});
    } else if (c.kind == "external") {
      if (c.prefix.empty()) {
        throw Error(ErrorKind::Validation, "external annotator '" + c.name + "' needs a prefix");
      }
      out.push_back({c.name, ExternalAnnotator{c.prefix}});
    } else if (c.kind == "exact_dup") {
      out.push_back({c.name, ExactDuplicateAnnotator{}});
    } else {
      throw Error(ErrorKind::Validation,
                  "annotator '" + c.name + "' has unknown kind '" + c.kind + "'");
    }
  }
  return out;
}

RunInputs load_run_inputs(const RunConfig& config) {
  if (config.claims.empty()) throw Error(ErrorKind::Validation, "no claims file configured");
  if (config.embeddings.empty()) {
    throw Error(ErrorKind::Validation, "no embeddings file configured");
  }
  if (config.annotators.empty()) throw Error(ErrorKind::Validation, "no annotators configured");
  try {
    config.params.validate();
    config.hnsw.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Validation, e.what());
  }

  auto claim_list = io::read_claims(config.claims);
  if (claim_list.empty()) {
    throw Error(ErrorKind::Validation, config.claims.string() + " contains no claims");
  }
  const auto report = validate_dataset(claim_list);
  if (!report.valid()) {
    std::vector<std::string> details;
    for (const auto& v : report.violations) details.push_back(v.message);
    const std::string message = std::to_string(report.violations.size()) +
                                " dataset violations (first: " + details.front() + ")";
    throw Error(ErrorKind::Validation, message, std::move(details));
  }
  ClaimTable claims(claim_list);

  const EmbeddingSet all = io::read_embeddings(config.embeddings);
  std::vector<std::string> missing;
  for (const auto& c : claim_list) {
    if (!all.contains(c.id)) missing.push_back(c.id);
  }
  if (!missing.empty()) {
    const std::string message = std::to_string(missing.size()) +
                                " claims have no embedding (first: '" + missing.front() + "')";
    throw Error(ErrorKind::Validation, message, std::move(missing));
  }
  EmbeddingSet embeddings = all.subset(claims.ids());

  auto annotators = make_annotators(config.annotators);
  for (const auto& a : annotators) {
    if (const auto* oracle = std::get_if<OracleAnnotator>(&a.kind)) {
      for (const auto& c : claim_list) {
        if (!oracle->reference.contains(c.id)) {
          throw Error(ErrorKind::Validation, "reference partition of annotator '" + a.name +
                                                 "' lacks claim '" + c.id + "'");
        }
      }
    }
  }
  return RunInputs{std::move(claim_list), std::move(claims), std::move(embeddings),
                   std::move(annotators)};
}

// --- run --------------------------------------------------------------------

namespace {

ordered_json counts_json(const StageCounts& c) {
  ordered_json j;
  j["claims"] = c.claims;
  j["pairs_generated"] = c.pairs_generated;
  j["pairs_auto_labeled"] = c.pairs_auto_labeled;
  j["pairs_annotated"] = c.pairs_annotated;
  j["pairs_labeled"] = c.pairs_labeled;
  j["pairs_similar"] = c.pairs_similar;
  j["clusters_before"] = c.clusters_before;
  j["merge_candidates"] = c.merge_candidates;
  j["merges_accepted"] = c.merges_accepted;
  j["clusters_after_merge"] = c.clusters_after_merge;
  return j;
}

void write_merge_candidates(const fs::path& file, std::span<const MergeCandidate> candidates) {
  std::string text;
  for (const auto& m : candidates) {
    ordered_json j;
    j["cluster_a"] = m.cluster_a;
    j["cluster_b"] = m.cluster_b;
    j["centroid_similarity"] = m.centroid_similarity;
    j["representative_a"] = m.representative_a;
    j["representative_b"] = m.representative_b;
    text += j.dump() + "\n";
  }
  io::write_text(file, text);
}

class Runner {
 public:
  Runner(const RunConfig& config, const StageLog& log) : config_(config), log_(log) {}

  template <typename Fn>
  auto stage(const std::string& name, Fn&& fn) {
    current_ = name;
    if (log_) log_(name, "start");
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        if (log_) log_(name, "done");
      } else {
        auto result = fn();
        if (log_) log_(name, "done");
        return result;
      }
    } catch (const Error& e) {
      fail(name, e);
    } catch (const fs::filesystem_error& e) {
      fail(name, Error(ErrorKind::Io, e.what()));
    }
  }

  void artifact(const fs::path& p) { artifacts_.push_back(p.filename().string()); }

  void write_manifest(const std::string& status, const std::string& failed_stage,
                      const std::string& error) const {
    ordered_json j;
    j["status"] = status;
    if (!failed_stage.empty()) {
      j["failed_stage"] = failed_stage;
      j["error"] = error;
    }
    j["config"] = config_json(config_);
    j["counts"] = counts_json(counts);
    j["artifacts"] = artifacts_;
    io::write_text(config_.out_dir / "manifest.json", j.dump(2) + "\n");
  }

  StageCounts counts;

 private:
  [[noreturn]] void fail(const std::string& name, const Error& e) {
    if (log_) log_(name, std::string("failed: ") + e.what());
    try {
      write_manifest("failed", name, e.what());
    } catch (const Error&) {
      // the stage error is the one worth reporting
    }
    throw StageError(name, e);
  }

  const RunConfig& config_;
  const StageLog& log_;
  std::string current_;
  std::vector<std::string> artifacts_;
};

}  // namespace

PipelineResult run_pipeline(const RunConfig& config, const StageLog& log) {
  const RunInputs inputs = load_run_inputs(config);
  const fs::path& out = config.out_dir;
  const unsigned threads = config.threads == 0 ? default_thread_count() : config.threads;
  std::vector<std::string> roster;
  for (const auto& a : inputs.annotators) roster.push_back(a.name);

  Runner run(config, log);
  run.counts.claims = inputs.claim_list.size();

  HnswParams hnsw = config.hnsw;
  hnsw.seed = config.seed;
  const HnswIndex index = run.stage("build_index", [&] {
    const fs::path cache = out / "index.hnsw";
    if (config.reuse_index_cache) {
      if (auto cached = HnswIndex::load(cache, inputs.embeddings, hnsw)) return std::move(*cached);
    }
    HnswIndex built = HnswIndex::build(inputs.embeddings, hnsw);
    fs::create_directories(out);
    built.save(cache);
    return built;
  });
  run.artifact("index.hnsw");

  const auto pairs = run.stage("generate_candidate_pairs", [&] {
    auto p = generate_candidate_pairs(inputs.embeddings, index, config.params.knn_candidates,
                                      threads);
    io::write_pairs(out / "candidate_pairs.jsonl", p);
    return p;
  });
  run.artifact("candidate_pairs.jsonl");
  run.counts.pairs_generated = pairs.size();

  const auto autolabel = run.stage("auto_label_exact_duplicates", [&] {
    auto r = auto_label_exact_duplicates(pairs, inputs.claims);
    io::write_labeled_pairs(out / "auto_labeled.jsonl", r.labeled);
    return r;
  });
  run.artifact("auto_labeled.jsonl");
  run.counts.pairs_auto_labeled = autolabel.labeled.size();

  const auto verdicts = run.stage("collect_verdicts", [&] {
    auto v = collect_verdicts(autolabel.remaining, inputs.annotators, inputs.claims, "pairs");
    io::write_verdicts(out / "verdicts.jsonl", v);
    return v;
  });
  run.artifact("verdicts.jsonl");
  run.counts.pairs_annotated = autolabel.remaining.size();

  const auto labeled = run.stage("aggregate_consensus", [&] {
    auto consensus = autolabel.remaining.empty()
                         ? std::vector<LabeledPair>{}
                         : aggregate_consensus(verdicts, config.params.consensus, roster);
    std::vector<LabeledPair> all = autolabel.labeled;
    all.insert(all.end(), consensus.begin(), consensus.end());
    std::sort(all.begin(), all.end(),
              [](const LabeledPair& a, const LabeledPair& b) { return a.pair < b.pair; });
    io::write_labeled_pairs(out / "labeled_pairs.jsonl", all);
    return all;
  });
  run.artifact("labeled_pairs.jsonl");
  run.counts.pairs_labeled = labeled.size();
  run.counts.pairs_similar = static_cast<std::size_t>(std::count_if(
      labeled.begin(), labeled.end(), [](const auto& p) { return p.label == Label::Similar; }));

  Partition partition = run.stage("build_subclusters", [&] {
    const auto ids = inputs.claims.ids();
    auto p = build_subclusters(labeled, ids);
    io::write_partition(out / "subclusters.tsv", p);
    return p;
  });
  run.artifact("subclusters.tsv");
  run.counts.clusters_before = partition.cluster_count();

  CandidateSearchOptions search;
  search.ann_cluster_threshold = config.ann_cluster_threshold;
  search.hnsw = hnsw;
  search.threads = threads;
  for (std::size_t pass = 1; pass <= config.params.merge_passes; ++pass) {
    const std::string tag = "merge-" + std::to_string(pass);
    const auto candidates = run.stage("propose_merge_candidates", [&] {
      auto c = propose_merge_candidates(partition, inputs.embeddings, config.params, search);
      write_merge_candidates(out / (tag + ".candidates.jsonl"), c);
      return c;
    });
    run.artifact(tag + ".candidates.jsonl");
    run.counts.merge_candidates.push_back(candidates.size());

    auto outcome = run.stage("merge_pass", [&] {
      auto o = merge_pass(partition, candidates, inputs.annotators, config.params.consensus,
                          inputs.claims, tag);
      io::write_verdicts(out / (tag + ".verdicts.jsonl"), o.verdicts);
      io::write_partition(out / (tag + ".partition.tsv"), o.partition);
      return o;
    });
    run.artifact(tag + ".verdicts.jsonl");
    run.artifact(tag + ".partition.tsv");
    run.counts.merges_accepted.push_back(outcome.merges_accepted);
    partition = std::move(outcome.partition);
  }
  run.counts.clusters_after_merge = partition.cluster_count();

  PipelineResult result{partition, run.counts, out / "partition.tsv", out / "manifest.json"};
  run.stage("write_outputs", [&] {
    io::write_partition(result.partition_file, partition);
    run.artifact("partition.tsv");
    run.write_manifest("ok", "", "");
  });
  return result;
}

}  // namespace claimnet
