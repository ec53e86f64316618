// claimnet: command-line front end for the claim clustering toolkit.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "claimnet/analytics.hpp"
#include "claimnet/baselines.hpp"
#include "claimnet/cluster_builder.hpp"
#include "claimnet/io.hpp"
#include "claimnet/metrics.hpp"
#include "claimnet/parallel.hpp"
#include "claimnet/pipeline.hpp"

namespace fs = std::filesystem;
using namespace claimnet;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitStage = 3;
constexpr int kExitIo = 4;

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
  std::optional<unsigned> threads;
};

Globals g;

// Config file first, then flags on top.
RunConfig effective_config() {
  RunConfig c = g.config_path.empty() ? RunConfig{} : read_run_config(g.config_path);
  if (g.seed) c.seed = *g.seed;
  if (!g.out.empty()) c.out_dir = g.out;
  if (g.threads) c.threads = *g.threads;
  if (c.threads == 0) c.threads = default_thread_count();
  return c;
}

void note(const std::string& line) {
  if (!g.quiet) std::cerr << line << '\n';
}

void stage_log(std::string_view stage, std::string_view message) {
  if (!g.quiet) std::cerr << "[" << stage << "] " << message << '\n';
}

// "name=oracle:path", "name=external:prefix", "name=exact_dup"
AnnotatorConfig parse_annotator_flag(const std::string& flag) {
  const auto eq = flag.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorKind::Validation, "annotator '" + flag + "' is not name=kind[:arg]");
  }
  AnnotatorConfig a;
  a.name = flag.substr(0, eq);
  const std::string rest = flag.substr(eq + 1);
  const auto colon = rest.find(':');
  a.kind = rest.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : rest.substr(colon + 1);
  if (a.kind == "oracle") a.partition = arg;
  if (a.kind == "external") a.prefix = arg;
  return a;
}

std::vector<AnnotatorSpec> annotators_for(const RunConfig& c,
                                          const std::vector<std::string>& flags) {
  std::vector<AnnotatorConfig> configs = c.annotators;
  if (!flags.empty()) {
    configs.clear();
    for (const auto& f : flags) configs.push_back(parse_annotator_flag(f));
  }
  if (configs.empty()) {
    throw Error(ErrorKind::Validation, "no annotators: pass --annotator or set them in --config");
  }
  return make_annotators(configs);
}

ConsensusPolicy policy_for(const RunConfig& c, const std::string& flag) {
  if (flag.empty()) return c.params.consensus;
  auto p = parse_policy(flag);
  if (!p) throw Error(ErrorKind::Validation, "policy must be unanimous or majority");
  return *p;
}

HnswIndex index_for(const EmbeddingSet& embeddings, const RunConfig& c) {
  HnswParams params = c.hnsw;
  params.seed = c.seed;
  const fs::path cache = c.out_dir / "index.hnsw";
  if (c.reuse_index_cache) {
    if (auto cached = HnswIndex::load(cache, embeddings, params)) {
      note("index: reusing " + cache.string());
      return std::move(*cached);
    }
  }
  HnswIndex index = HnswIndex::build(embeddings, params);
  fs::create_directories(c.out_dir);
  index.save(cache);
  note("index: built " + std::to_string(index.size()) + " points -> " + cache.string());
  return index;
}

std::string fmt_threshold(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

void write_candidates(const fs::path& file, const std::vector<MergeCandidate>& candidates) {
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

void write_baseline_manifest(const fs::path& file, const std::string& algorithm,
                             const ordered_json& config, double seconds, bool converged,
                             const Partition& partition, const std::optional<MetricReport>& m) {
  ordered_json j;
  j["algorithm"] = algorithm;
  j["config"] = config;
  j["wall_time_seconds"] = seconds;
  j["converged"] = converged;
  j["n_claims"] = partition.size();
  j["n_clusters"] = partition.cluster_count();
  if (m) j["metrics"] = nlohmann::ordered_json::parse(to_json(*m));
  io::write_text(file, j.dump(2) + "\n");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const StageError*>(&e)) return kExitStage;
  switch (e.kind()) {
    case ErrorKind::Io: return kExitIo;
    case ErrorKind::MissingVerdict:
    case ErrorKind::MalformedVerdict:
    case ErrorKind::IncompleteVerdicts: return kExitStage;
    default: return kExitValidation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"claimnet - claim clustering toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", g.config_path, "Run config JSON")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_flag("--quiet", g.quiet, "Suppress the stage log");
  app.add_option("--threads", g.threads, "Worker threads (default: logical cores)");

  std::function<int()> action;

  // validate
  auto* validate = app.add_subcommand("validate", "Check a claims file (and embeddings)");
  std::string v_claims, v_emb;
  validate->add_option("--claims", v_claims)->required();
  validate->add_option("--embeddings", v_emb);
  validate->callback([&] {
    action = [&] {
      const auto claims = io::read_claims(v_claims);
      const auto report = validate_dataset(claims);
      for (const auto& v : report.violations) {
        std::cout << to_string(v.kind) << '\t' << v.index << '\t' << v.claim_id << '\t'
                  << v.message << '\n';
      }
      std::size_t missing = 0;
      if (!v_emb.empty()) {
        const auto emb = io::read_embeddings(v_emb);
        for (const auto& c : claims) {
          if (!emb.contains(c.id)) {
            std::cout << "missing_embedding\t-\t" << c.id << "\tno embedding\n";
            ++missing;
          }
        }
      }
      std::cout << report.claims_checked << " claims checked, "
                << report.violations.size() + missing << " violations\n";
      return report.valid() && missing == 0 && !claims.empty() ? kExitOk : kExitValidation;
    };
  });

  // index build
  auto* index = app.add_subcommand("index", "Nearest-neighbor index")->require_subcommand(1);
  auto* index_build = index->add_subcommand("build", "Build (or reuse) the HNSW cache");
  std::string i_emb;
  index_build->add_option("--embeddings", i_emb)->required();
  index_build->callback([&] {
    action = [&] {
      const auto c = effective_config();
      index_for(io::read_embeddings(i_emb), c);
      return kExitOk;
    };
  });

  // pairs
  auto* pairs = app.add_subcommand("pairs", "Candidate pairs and verdicts")->require_subcommand(1);
  auto* p_gen = pairs->add_subcommand("generate", "k-NN candidate pairs");
  std::string pg_emb;
  std::optional<std::size_t> pg_k;
  p_gen->add_option("--embeddings", pg_emb)->required();
  p_gen->add_option("-k,--knn", pg_k, "Neighbors per claim");
  p_gen->callback([&] {
    action = [&] {
      const auto c = effective_config();
      const auto emb = io::read_embeddings(pg_emb);
      const auto idx = index_for(emb, c);
      const auto p = generate_candidate_pairs(emb, idx, pg_k.value_or(c.params.knn_candidates),
                                              c.threads);
      io::write_pairs(c.out_dir / "candidate_pairs.jsonl", p);
      note("pairs: " + std::to_string(p.size()) + " candidates");
      return kExitOk;
    };
  });

  auto* p_req = pairs->add_subcommand("annotate-requests", "Write an external request file");
  std::string pr_pairs, pr_claims, pr_prefix, pr_stage = "pairs";
  p_req->add_option("--pairs", pr_pairs)->required();
  p_req->add_option("--claims", pr_claims)->required();
  p_req->add_option("--prefix", pr_prefix, "Batch file prefix")->required();
  p_req->add_option("--stage", pr_stage, "Stage tag in the file name");
  p_req->callback([&] {
    action = [&] {
      const ClaimTable claims(io::read_claims(pr_claims));
      const auto p = io::read_pairs(pr_pairs);
      const ExternalAnnotator ext{pr_prefix};
      const auto files = external_batch_files(ext, pr_stage);
      io::write_annotation_requests(files.requests, p, claims);
      note("requests: " + files.requests.string());
      return kExitOk;
    };
  });

  auto* p_con = pairs->add_subcommand("consensus", "Auto-label, collect verdicts, aggregate");
  std::string pc_pairs, pc_claims, pc_policy;
  std::vector<std::string> pc_annotators;
  p_con->add_option("--pairs", pc_pairs)->required();
  p_con->add_option("--claims", pc_claims)->required();
  p_con->add_option("--annotator", pc_annotators, "name=oracle:path|external:prefix|exact_dup");
  p_con->add_option("--policy", pc_policy, "unanimous|majority");
  p_con->callback([&] {
    action = [&] {
      const auto c = effective_config();
      const ClaimTable claims(io::read_claims(pc_claims));
      const auto annotators = annotators_for(c, pc_annotators);
      std::vector<std::string> roster;
      for (const auto& a : annotators) roster.push_back(a.name);
      const auto p = io::read_pairs(pc_pairs);
      const auto autolabel = auto_label_exact_duplicates(p, claims);
      const auto verdicts = collect_verdicts(autolabel.remaining, annotators, claims, "pairs");
      io::write_verdicts(c.out_dir / "verdicts.jsonl", verdicts);
      auto labeled = autolabel.labeled;
      if (!autolabel.remaining.empty()) {
        const auto consensus = aggregate_consensus(verdicts, policy_for(c, pc_policy), roster);
        labeled.insert(labeled.end(), consensus.begin(), consensus.end());
      }
      std::sort(labeled.begin(), labeled.end(),
                [](const auto& a, const auto& b) { return a.pair < b.pair; });
      io::write_labeled_pairs(c.out_dir / "labeled_pairs.jsonl", labeled);
      for (const auto& agreement : pairwise_agreement(verdicts)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "agreement %s/%s: %.4f over %zu pairs",
                      agreement.annotator_a.c_str(), agreement.annotator_b.c_str(),
                      agreement.rate(), agreement.shared_pairs);
        note(buf);
      }
      note("consensus: " + std::to_string(labeled.size()) + " labeled pairs (" +
           std::to_string(autolabel.labeled.size()) + " exact duplicates)");
      return kExitOk;
    };
  });

  // clusters
  auto* clusters = app.add_subcommand("clusters", "Sub-clusters and merging")->require_subcommand(1);
  auto* c_build = clusters->add_subcommand("build", "Connected components of SIMILAR pairs");
  std::string cb_labeled, cb_claims;
  c_build->add_option("--labeled", cb_labeled)->required();
  c_build->add_option("--claims", cb_claims)->required();
  c_build->callback([&] {
    action = [&] {
      const auto c = effective_config();
      const ClaimTable claims(io::read_claims(cb_claims));
      const auto ids = claims.ids();
      const auto p = build_subclusters(io::read_labeled_pairs(cb_labeled), ids);
      io::write_partition(c.out_dir / "subclusters.tsv", p);
      note("clusters: " + std::to_string(p.cluster_count()) + " sub-clusters");
      return kExitOk;
    };
  });

  auto* c_merge = clusters->add_subcommand("merge", "Centroid merge passes");
  std::string cm_part, cm_emb, cm_claims, cm_policy;
  std::vector<std::string> cm_annotators;
  c_merge->add_option("--partition", cm_part)->required();
  c_merge->add_option("--embeddings", cm_emb)->required();
  c_merge->add_option("--claims", cm_claims)->required();
  c_merge->add_option("--annotator", cm_annotators, "name=oracle:path|external:prefix|exact_dup");
  c_merge->add_option("--policy", cm_policy, "unanimous|majority");
  c_merge->callback([&] {
    action = [&] {
      const auto c = effective_config();
      const ClaimTable claims(io::read_claims(cm_claims));
      const auto emb = io::read_embeddings(cm_emb);
      const auto annotators = annotators_for(c, cm_annotators);
      Partition partition = io::read_partition(cm_part);
      CandidateSearchOptions search;
      search.ann_cluster_threshold = c.ann_cluster_threshold;
      search.hnsw = c.hnsw;
      search.hnsw.seed = c.seed;
      search.threads = c.threads;
      for (std::size_t pass = 1; pass <= c.params.merge_passes; ++pass) {
        const std::string tag = "merge-" + std::to_string(pass);
        const auto candidates = propose_merge_candidates(partition, emb, c.params, search);
        write_candidates(c.out_dir / (tag + ".candidates.jsonl"), candidates);
        auto outcome = merge_pass(partition, candidates, annotators, policy_for(c, cm_policy),
                                  claims, tag);
        io::write_verdicts(c.out_dir / (tag + ".verdicts.jsonl"), outcome.verdicts);
        note(tag + ": " + std::to_string(candidates.size()) + " candidates, " +
             std::to_string(outcome.merges_accepted) + " merged");
        partition = std::move(outcome.partition);
      }
      io::write_partition(c.out_dir / "merged.tsv", partition);
      return kExitOk;
    };
  });

  auto* c_review = clusters->add_subcommand("review", "Cluster pairs for manual review");
  std::string cr_part, cr_emb, cr_claims;
  double cr_threshold = 0.75;
  std::size_t cr_audit = 20;
  c_review->add_option("--partition", cr_part)->required();
  c_review->add_option("--embeddings", cr_emb)->required();
  c_review->add_option("--claims", cr_claims)->required();
  c_review->add_option("--threshold", cr_threshold, "Centroid cosine cut (exclusive)");
  c_review->add_option("--audit-size", cr_audit, "Audit clusters larger than this");
  c_review->callback([&] {
    action = [&] {
      const auto c = effective_config();
      const ClaimTable claims(io::read_claims(cr_claims));
      const auto review = propose_manual_merges(io::read_partition(cr_part),
                                                io::read_embeddings(cr_emb), claims,
                                                cr_threshold, cr_audit, c.threads);
      write_review(c.out_dir / "review.tsv", review);
      write_audit(c.out_dir / "audit.tsv", review);
      note("review: " + std::to_string(review.rows.size()) + " pairs, " +
           std::to_string(review.large_clusters.size()) + " large clusters");
      return kExitOk;
    };
  });

  auto* c_apply = clusters->add_subcommand("apply-merges", "Apply reviewed merge decisions");
  std::string ca_part, ca_decisions;
  c_apply->add_option("--partition", ca_part)->required();
  c_apply->add_option("--decisions", ca_decisions, "TSV cluster_a<TAB>cluster_b")->required();
  c_apply->callback([&] {
    action = [&] {
      const auto c = effective_config();
      const auto decisions = io::read_merge_decisions(ca_decisions);
      const auto p = apply_manual_merges(io::read_partition(ca_part), decisions);
      io::write_partition(c.out_dir / "partition.tsv", p);
      note("apply-merges: " + std::to_string(p.cluster_count()) + " clusters");
      return kExitOk;
    };
  });

  // baselines
  auto* baseline = app.add_subcommand("baseline", "Reference clusterers")->require_subcommand(1);
  auto* b_agg = baseline->add_subcommand("agglomerative", "Distance-threshold agglomerative grid");
  std::string ba_emb, ba_truth, ba_metric;
  std::vector<std::string> ba_linkages;
  std::vector<double> ba_thresholds;
  b_agg->add_option("--embeddings", ba_emb)->required();
  b_agg->add_option("--linkage", ba_linkages, "ward|complete|average|single")->delimiter(',');
  b_agg->add_option("--threshold", ba_thresholds, "Distance thresholds")->delimiter(',');
  b_agg->add_option("--metric", ba_metric, "euclidean|cosine");
  b_agg->add_option("--truth", ba_truth, "Reference partition to score against");
  b_agg->callback([&] {
    action = [&] {
      const auto c = effective_config();
      const auto emb = io::read_embeddings(ba_emb);
      std::optional<Partition> truth;
      if (!ba_truth.empty()) truth = io::read_partition(ba_truth);
      DistanceMetric metric = c.agglomerative.metric;
      if (!ba_metric.empty()) {
        auto m = parse_metric(ba_metric);
        if (!m) throw Error(ErrorKind::Validation, "unknown metric '" + ba_metric + "'");
        metric = *m;
      }
      std::vector<Linkage> linkages;
      for (const auto& l : ba_linkages) {
        auto parsed = parse_linkage(l);
        if (!parsed) throw Error(ErrorKind::Validation, "unknown linkage '" + l + "'");
        linkages.push_back(*parsed);
      }
      if (linkages.empty()) linkages.push_back(c.agglomerative.linkage);
      auto thresholds = ba_thresholds;
      if (thresholds.empty()) thresholds.push_back(c.agglomerative.distance_threshold);
      for (double t : thresholds) AgglomerativeConfig{Linkage::Single, t, metric}.validate();
      for (Linkage l : linkages) AgglomerativeConfig{l, thresholds.front(), metric}.validate();

      if (truth) std::cout << table_header();
      for (Linkage l : linkages) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto dendrogram = agglomerative_dendrogram(emb, l, metric);
        const double build_seconds = seconds_since(t0);
        for (double t : thresholds) {
          const auto t1 = std::chrono::steady_clock::now();
          const auto p = dendrogram.cut(t);
          const double seconds = build_seconds + seconds_since(t1);
          const std::string name =
              "agglomerative_" + std::string(to_string(l)) + "_" + fmt_threshold(t);
          io::write_partition(c.out_dir / (name + ".tsv"), p);
          std::optional<MetricReport> report;
          if (truth) {
            report = evaluate(p, *truth, name);
            std::cout << table_row(*report);
          }
          ordered_json cfg;
          cfg["linkage"] = to_string(l);
          cfg["distance_threshold"] = t;
          cfg["metric"] = to_string(metric);
          write_baseline_manifest(c.out_dir / (name + ".json"), "agglomerative", cfg, seconds,
                                  true, p, report);
          note(name + ": " + std::to_string(p.cluster_count()) + " clusters");
        }
      }
      return kExitOk;
    };
  });

  auto* b_ap = baseline->add_subcommand("affinity", "Affinity propagation");
  std::string bp_emb, bp_truth;
  std::optional<double> bp_damping, bp_preference;
  std::optional<std::size_t> bp_iter;
  b_ap->add_option("--embeddings", bp_emb)->required();
  b_ap->add_option("--damping", bp_damping);
  b_ap->add_option("--preference", bp_preference, "Default: median similarity");
  b_ap->add_option("--max-iterations", bp_iter);
  b_ap->add_option("--truth", bp_truth, "Reference partition to score against");
  b_ap->callback([&] {
    action = [&] {
      const auto c = effective_config();
      AffinityPropagationConfig cfg = c.affinity;
      if (bp_damping) cfg.damping = *bp_damping;
      if (bp_preference) cfg.preference = *bp_preference;
      if (bp_iter) cfg.max_iterations = *bp_iter;
      cfg.validate();
      const auto emb = io::read_embeddings(bp_emb);
      const auto t0 = std::chrono::steady_clock::now();
      const auto r = affinity_propagation(emb, cfg);
      const double seconds = seconds_since(t0);
      io::write_partition(c.out_dir / "affinity_propagation.tsv", r.partition);
      std::optional<MetricReport> report;
      if (!bp_truth.empty()) {
        report = evaluate(r.partition, io::read_partition(bp_truth), "affinity_propagation");
        std::cout << table_header() << table_row(*report);
      }
      ordered_json j;
      j["damping"] = cfg.damping;
      j["preference"] = r.preference;
      j["max_iterations"] = cfg.max_iterations;
      j["convergence_window"] = cfg.convergence_window;
      j["iterations"] = r.iterations;
      write_baseline_manifest(c.out_dir / "affinity_propagation.json", "affinity_propagation",
                              j, seconds, r.converged, r.partition, report);
      note("affinity: " + std::to_string(r.partition.cluster_count()) + " clusters" +
           (r.converged ? "" : " (not converged)"));
      return kExitOk;
    };
  });

  // eval
  auto* eval = app.add_subcommand("eval", "Score a partition against a reference");
  std::string e_pred, e_truth, e_claims, e_name = "prediction";
  eval->add_option("--pred", e_pred)->required();
  eval->add_option("--truth", e_truth)->required();
  eval->add_option("--claims", e_claims, "Also check the ids against a claims file");
  eval->add_option("--name", e_name, "Algorithm label in the report");
  eval->callback([&] {
    action = [&] {
      const auto pred = io::read_partition(e_pred);
      const auto truth = io::read_partition(e_truth);
      if (!e_claims.empty()) {
        const auto claims = io::read_claims(e_claims);
        std::map<ClaimId, std::string> all;
        for (const auto& cl : claims) all.emplace(cl.id, cl.id);
        contingency(pred, Partition(all));
      }
      const auto report = evaluate(pred, truth, e_name);
      std::cout << to_json(report);
      if (!g.out.empty()) io::write_text(fs::path(g.out) / "metrics.json", to_json(report));
      note(table_header() + table_row(report));
      return kExitOk;
    };
  });

  // stats / temporal
  auto* stats = app.add_subcommand("stats", "Dataset statistics of a partition");
  std::string s_claims, s_part, s_name = "dataset";
  stats->add_option("--claims", s_claims)->required();
  stats->add_option("--partition", s_part)->required();
  stats->add_option("--name", s_name, "Dataset label");
  stats->callback([&] {
    action = [&] {
      const ClaimTable claims(io::read_claims(s_claims));
      const auto p = io::read_partition(s_part);
      const auto ps = partition_stats(p, claims);
      const auto ms = multilingual_stats(p, claims);
      std::cout << stats_table(s_name, ps, ms);
      if (!g.out.empty()) {
        io::write_text(fs::path(g.out) / "stats.json", to_json(ps, ms));
        io::write_text(fs::path(g.out) / "languages.csv", language_csv(language_counts(claims)));
      }
      return kExitOk;
    };
  });

  auto* temporal = app.add_subcommand("temporal", "Day offsets of repeated claims");
  std::string t_claims, t_part;
  temporal->add_option("--claims", t_claims)->required();
  temporal->add_option("--partition", t_part)->required();
  temporal->callback([&] {
    action = [&] {
      const ClaimTable claims(io::read_claims(t_claims));
      const auto t = temporal_repetition(io::read_partition(t_part), claims);
      std::cout << to_json(t);
      if (!g.out.empty()) {
        io::write_text(fs::path(g.out) / "temporal.json", to_json(t));
        io::write_text(fs::path(g.out) / "temporal_histogram.csv", histogram_csv(t));
      }
      return kExitOk;
    };
  });

  // pipeline run
  auto* pipeline = app.add_subcommand("pipeline", "End-to-end runs")->require_subcommand(1);
  auto* p_run = pipeline->add_subcommand("run", "Run every stage from one config");
  p_run->callback([&] {
    action = [&] {
      const auto c = effective_config();
      const auto result = run_pipeline(c, stage_log);
      note("pipeline: " + std::to_string(result.partition.cluster_count()) + " clusters -> " +
           result.partition_file.string());
      return kExitOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    return action ? action() : kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  }
}
