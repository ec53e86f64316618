#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "claimnet/io.hpp"
#include "claimnet/metrics.hpp"
#include "fixtures.hpp"

using namespace claimnet;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run cli(const fixtures::TempDir& dir, const std::string& args) {
  const auto captured = dir / "stdout.txt";
  const std::string command = std::string(CLAIMNET_CLI) + " " + args + " > '" +
                              captured.string() + "' 2> '" + (dir / "stderr.txt").string() + "'";
  const int status = std::system(command.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, io::read_text(captured)};
}

struct Data {
  fixtures::TempDir dir;
  fixtures::Planted planted;
  std::string claims, emb, truth;
};

std::unique_ptr<Data> data() {
  auto d = std::make_unique<Data>();
  d->planted = fixtures::planted(120, 12, 4, 32);
  d->claims = (d->dir / "claims.jsonl").string();
  d->emb = (d->dir / "emb.jsonl").string();
  d->truth = (d->dir / "truth.tsv").string();
  io::write_claims(d->claims, d->planted.claims);
  io::write_embeddings(d->emb, d->planted.embeddings);
  io::write_partition(d->truth, d->planted.truth);
  return d;
}

}  // namespace

TEST_CASE("help and usage errors") {
  fixtures::TempDir dir;
  CHECK(cli(dir, "--help").code == 0);
  CHECK(cli(dir, "").code == 2);
  CHECK(cli(dir, "frobnicate").code == 2);
  CHECK(cli(dir, "eval --pred x").code == 2);
}

TEST_CASE("validate") {
  auto d = data();
  auto ok = cli(d->dir, "validate --claims " + d->claims + " --embeddings " + d->emb);
  CHECK(ok.code == 0);
  CHECK(ok.out.find("120 claims checked, 0 violations") != std::string::npos);

  auto bad_claims = d->planted.claims;
  bad_claims[3].language = "English";
  bad_claims[5].id = bad_claims[4].id;
  io::write_claims(d->dir / "bad.jsonl", bad_claims);
  auto bad = cli(d->dir, "validate --claims " + (d->dir / "bad.jsonl").string());
  CHECK(bad.code == 2);
  CHECK(bad.out.find("2 violations") != std::string::npos);
  CHECK(cli(d->dir, "validate --claims " + (d->dir / "missing.jsonl").string()).code == 4);
}

TEST_CASE("staged workflow") {
  auto d = data();
  const auto out = (d->dir / "out").string();
  const std::string common = " --quiet --out " + out;
  REQUIRE(cli(d->dir, "index build --embeddings " + d->emb + common).code == 0);
  CHECK(fs::exists(d->dir / "out" / "index.hnsw"));
  REQUIRE(cli(d->dir, "pairs generate -k 2 --embeddings " + d->emb + common).code == 0);
  const auto pairs = out + "/candidate_pairs.jsonl";
  CHECK(!io::read_pairs(pairs).empty());

  const auto oracle = " --annotator o1=oracle:" + d->truth + " --annotator o2=oracle:" + d->truth;
  auto con = cli(d->dir, "pairs consensus --pairs " + pairs + " --claims " + d->claims + oracle + common);
  REQUIRE(con.code == 0);
  CHECK(fs::exists(d->dir / "out" / "labeled_pairs.jsonl"));

  REQUIRE(cli(d->dir, "clusters build --labeled " + out + "/labeled_pairs.jsonl --claims " +
                          d->claims + common).code == 0);
  REQUIRE(cli(d->dir, "clusters merge --partition " + out + "/subclusters.tsv --embeddings " +
                          d->emb + " --claims " + d->claims + oracle + common).code == 0);
  const auto merged = io::read_partition(d->dir / "out" / "merged.tsv");
  CHECK(evaluate(merged, d->planted.truth).ari >= 0.95);

  auto ev = cli(d->dir, "eval --pred " + out + "/merged.tsv --truth " + d->truth + " --name ours");
  REQUIRE(ev.code == 0);
  const auto report = metric_report_from_json(ev.out);
  CHECK(report.algorithm == "ours");
  CHECK(report == evaluate(merged, d->planted.truth, "ours"));

  REQUIRE(cli(d->dir, "clusters review --partition " + out + "/subclusters.tsv --embeddings " +
                          d->emb + " --claims " + d->claims + common).code == 0);
  CHECK(io::read_text(d->dir / "out" / "review.tsv").rfind("cluster_a\tcluster_b\tsimilarity", 0) == 0);
  CHECK(io::read_text(d->dir / "out" / "audit.tsv").rfind("cluster_id\tsize", 0) == 0);

  io::write_merge_decisions(d->dir / "decisions.tsv", std::vector<std::pair<ClusterId, ClusterId>>{});
  CHECK(cli(d->dir, "clusters apply-merges --partition " + out + "/merged.tsv --decisions " +
                        (d->dir / "decisions.tsv").string() + common).code == 0);
  CHECK(io::read_partition(d->dir / "out" / "partition.tsv") == merged);
}

TEST_CASE("external annotator round trip through files") {
  auto d = data();
  const auto out = (d->dir / "out").string();
  const std::string common = " --quiet --out " + out;
  REQUIRE(cli(d->dir, "pairs generate --embeddings " + d->emb + common).code == 0);
  const auto pairs = out + "/candidate_pairs.jsonl";
  const auto prefix = (d->dir / "ext").string();
  auto first = cli(d->dir, "pairs consensus --pairs " + pairs + " --claims " + d->claims +
                               " --annotator h=external:" + prefix + common);
  CHECK(first.code == 3);
  REQUIRE(fs::exists(prefix + ".pairs.requests.jsonl"));

  std::ifstream req(prefix + ".pairs.requests.jsonl");
  std::ofstream resp(prefix + ".pairs.responses.jsonl");
  std::string line;
  while (std::getline(req, line)) {
    const auto j = nlohmann::json::parse(line);
    const auto a = j["pair_a"].get<std::string>(), b = j["pair_b"].get<std::string>();
    const bool same = d->planted.truth.cluster_of(a) == d->planted.truth.cluster_of(b);
    resp << nlohmann::json{{"pair_a", a}, {"pair_b", b}, {"label", same ? "similar" : "dissimilar"}}.dump()
         << "\n";
  }
  resp.close();
  CHECK(cli(d->dir, "pairs consensus --pairs " + pairs + " --claims " + d->claims +
                        " --annotator h=external:" + prefix + common).code == 0);
}

TEST_CASE("baselines, stats, temporal") {
  auto d = data();
  const auto out = (d->dir / "out").string();
  const std::string common = " --quiet --out " + out;
  REQUIRE(cli(d->dir, "baseline agglomerative --embeddings " + d->emb +
                          " --linkage ward,average --threshold 0.5,1.0 --truth " + d->truth + common)
              .code == 0);
  const auto manifest = nlohmann::json::parse(io::read_text(d->dir / "out" / "agglomerative_ward_1.json"));
  CHECK(manifest["algorithm"] == "agglomerative");
  CHECK(manifest["metrics"]["ari"].get<double>() == doctest::Approx(1.0));
  CHECK(fs::exists(d->dir / "out" / "agglomerative_average_0.5.tsv"));
  CHECK(cli(d->dir, "baseline agglomerative --embeddings " + d->emb +
                        " --metric cosine --linkage ward" + common).code == 2);

  REQUIRE(cli(d->dir, "baseline affinity --embeddings " + d->emb + common).code == 0);
  CHECK(fs::exists(d->dir / "out" / "affinity_propagation.tsv"));

  auto st = cli(d->dir, "stats --claims " + d->claims + " --partition " + d->truth + " --name P" + common);
  REQUIRE(st.code == 0);
  CHECK(st.out.find("120") != std::string::npos);
  CHECK(fs::exists(d->dir / "out" / "stats.json"));
  auto tm = cli(d->dir, "temporal --claims " + d->claims + " --partition " + d->truth);
  REQUIRE(tm.code == 0);
  CHECK(nlohmann::json::parse(tm.out).contains("p50_days"));

  io::write_partition(d->dir / "short.tsv", Partition::from_groups({{"zz"}}));
  CHECK(cli(d->dir, "eval --pred " + (d->dir / "short.tsv").string() + " --truth " + d->truth).code == 2);
}

TEST_CASE("pipeline run from a config file") {
  auto d = data();
  nlohmann::json cfg{{"claims", d->claims},
                     {"embeddings", d->emb},
                     {"annotators", {{{"name", "o"}, {"kind", "oracle"}, {"partition", d->truth}}}}};
  io::write_text(d->dir / "run.json", cfg.dump());
  const auto out = (d->dir / "run").string();
  auto r = cli(d->dir, "--config " + (d->dir / "run.json").string() + " pipeline run --quiet --out " + out);
  REQUIRE(r.code == 0);
  CHECK(evaluate(io::read_partition(out + "/partition.tsv"), d->planted.truth).ari >= 0.95);
  const auto first = io::read_text(out + "/partition.tsv");
  REQUIRE(cli(d->dir, "--config " + (d->dir / "run.json").string() + " pipeline run --quiet --seed 42 --out " +
                          (d->dir / "run2").string()).code == 0);
  CHECK(io::read_text(d->dir / "run2" / "partition.tsv") == first);

  nlohmann::json ext = cfg;
  ext["annotators"].push_back({{"name", "x"}, {"kind", "external"}, {"prefix", (d->dir / "xb").string()}});
  io::write_text(d->dir / "ext.json", ext.dump());
  CHECK(cli(d->dir, "--config " + (d->dir / "ext.json").string() + " pipeline run --quiet --out " +
                        (d->dir / "run3").string()).code == 3);
  io::write_text(d->dir / "bad.json", "{\"claims\": 1}");
  CHECK(cli(d->dir, "--config " + (d->dir / "bad.json").string() + " pipeline run --quiet").code == 2);
}
