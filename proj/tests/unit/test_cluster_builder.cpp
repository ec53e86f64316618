#include <doctest.h>

#include <cmath>
#include <random>

#include "claimnet/cluster_builder.hpp"
#include "claimnet/error.hpp"
#include "claimnet/io.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace claimnet;
using V = std::vector<float>;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Io;
}

LabeledPair similar(ClaimId a, ClaimId b) {
  return {canonical_pair_key(a, b), Label::Similar, Provenance::Consensus};
}

// Unit 2-d vector at the given cosine to [1, 0].
V at_cosine(double c) { return {static_cast<float>(c), static_cast<float>(std::sqrt(1 - c * c))}; }

ClaimTable claims_for(const std::vector<ClaimId>& ids) {
  std::vector<Claim> cs;
  for (const auto& id : ids) {
    Claim c;
    c.id = id;
    c.text = "text of " + id;
    c.language = "en";
    cs.push_back(c);
  }
  return ClaimTable(cs);
}

bool is_coarsening(const Partition& fine, const Partition& coarse) {
  for (const auto& [_, members] : fine.clusters()) {
    for (const auto& m : members) {
      if (coarse.cluster_of(m) != coarse.cluster_of(members.front())) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("chain links into one cluster; unlinked claims stay single") {
  std::vector<LabeledPair> pairs{similar("A", "B"), similar("B", "C")};
  std::vector<ClaimId> universe{"A", "B", "C", "D"};
  auto p = build_subclusters(pairs, universe);
  CHECK(p.cluster_count() == 2);
  CHECK(p.members("A") == std::vector<ClaimId>{"A", "B", "C"});
  CHECK(p.members("D") == std::vector<ClaimId>{"D"});
}

TEST_CASE("no pairs, dissimilar pairs, errors") {
  std::vector<ClaimId> universe{"a", "b", "c"};
  CHECK(build_subclusters({}, universe).cluster_count() == 3);
  std::vector<LabeledPair> dis{{{"a", "b"}, Label::Dissimilar, Provenance::Consensus}};
  CHECK(build_subclusters(dis, universe).cluster_count() == 3);
  std::vector<LabeledPair> bad{similar("a", "z")};
  CHECK(kind_of([&] { build_subclusters(bad, universe); }) == ErrorKind::UnknownClaimId);
  std::vector<ClaimId> dup{"a", "a"};
  CHECK(kind_of([&] { build_subclusters({}, dup); }) == ErrorKind::DuplicateId);
}

TEST_CASE("property: sub-clusters equal traversal components") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng() % 300;
    std::vector<ClaimId> universe;
    for (std::size_t i = 0; i < n; ++i) universe.push_back(fixtures::id("u", i));
    std::vector<LabeledPair> pairs;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    const std::size_t m = n < 2 ? 0 : rng() % n;
    for (std::size_t e = 0; e < m; ++e) {
      const std::size_t a = rng() % n, b = rng() % n;
      if (a == b) continue;
      const bool sim = rng() % 4 != 0;
      pairs.push_back({canonical_pair_key(universe[a], universe[b]),
                       sim ? Label::Similar : Label::Dissimilar, Provenance::Consensus});
      if (sim) edges.emplace_back(a, b);
    }
    const auto p = build_subclusters(pairs, universe);
    const auto comp = oracle::bfs_components(n, edges);
    for (std::size_t i = 0; i < n; ++i) {
      // BFS labels by smallest index, ids are zero-padded: same canonical ids.
      CHECK(p.cluster_of(universe[i]) == universe[comp[i]]);
    }
  }
}

TEST_CASE("centroids and representatives") {
  EmbeddingSet e(2);
  e.add("a", V{1, 0});
  e.add("b", V{0, 1});
  e.add("c", at_cosine(0.9));
  auto p = Partition::from_groups({{"a", "b"}, {"c"}});
  auto cc = compute_centroids(p, e);
  REQUIRE(cc.clusters == std::vector<ClusterId>{"a", "c"});
  // a and b tie against the [0.5, 0.5] centroid: smallest id wins.
  CHECK(cc.representatives[0] == "a");
  CHECK(cc.centroids.at("a")[0] == doctest::Approx(std::sqrt(0.5)));

  EmbeddingSet anti(2);
  anti.add("x", V{1, 0});
  anti.add("y", V{-1, 0});
  CHECK(kind_of([&] { compute_centroids(Partition::from_groups({{"x", "y"}}), anti); }) ==
        ErrorKind::ZeroVector);
}

TEST_CASE("merge candidates by threshold") {
  PipelineParams params;
  EmbeddingSet e(2);
  e.add("a", V{1, 0});
  e.add("b", at_cosine(0.8));
  e.add("c", V{-1, 0});
  auto singles = Partition::from_groups({{"a"}, {"b"}, {"c"}});
  auto cands = propose_merge_candidates(singles, e, params);
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].cluster_a == "a");
  CHECK(cands[0].cluster_b == "b");
  CHECK(cands[0].centroid_similarity == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(cands[0].representative_a == "a");

  EmbeddingSet low(2);
  low.add("a", V{1, 0});
  low.add("b", at_cosine(0.6));
  CHECK(propose_merge_candidates(Partition::from_groups({{"a"}, {"b"}}), low, params).empty());
  CHECK(propose_merge_candidates(Partition::from_groups({{"a", "b"}}), low, params).empty());
}

TEST_CASE("merge candidates: exact scan and ANN path agree on planted data") {
  auto data = fixtures::planted(200, 40, 8, 32);
  std::vector<std::vector<ClaimId>> halves;
  for (const auto& [_, members] : data.truth.clusters()) {
    std::vector<ClaimId> first(members.begin(), members.begin() + members.size() / 2);
    std::vector<ClaimId> second(members.begin() + members.size() / 2, members.end());
    halves.push_back(first);
    halves.push_back(second);
  }
  auto split = Partition::from_groups(halves);
  PipelineParams params;
  CandidateSearchOptions exact, ann;
  ann.ann_cluster_threshold = 0;
  ann.hnsw.ef_search = 200;
  auto a = propose_merge_candidates(split, data.embeddings, params, exact);
  auto b = propose_merge_candidates(split, data.embeddings, params, ann);
  CHECK(a == b);
  CandidateSearchOptions threaded = exact;
  threaded.threads = 4;
  CHECK(propose_merge_candidates(split, data.embeddings, params, threaded) == a);
  for (const auto& c : a) {
    CHECK(c.cluster_a < c.cluster_b);
    CHECK(c.centroid_similarity >= params.merge_sim_threshold);
  }
}

TEST_CASE("merge pass") {
  EmbeddingSet e(2);
  e.add("x", V{1, 0});
  e.add("y", at_cosine(0.95));
  e.add("z", at_cosine(0.8));
  auto claims = claims_for({"x", "y", "z"});
  auto singles = Partition::from_groups({{"x"}, {"y"}, {"z"}});
  PipelineParams params;
  auto cands = propose_merge_candidates(singles, e, params);
  REQUIRE(cands.size() == 3);

  SUBCASE("similar consensus unions, transitively") {
    std::vector<AnnotatorSpec> ann{{"o", OracleAnnotator{Partition::from_groups({{"x", "y", "z"}})}}};
    std::vector<MergeCandidate> chain{cands[0], cands[2]};  // (x,y), (y,z)
    auto out = merge_pass(singles, chain, ann, ConsensusPolicy::Unanimous, claims);
    CHECK(out.partition.cluster_count() == 1);
    CHECK(out.merges_accepted == 2);
    CHECK(out.verdicts.size() == 2);
    CHECK(is_coarsening(singles, out.partition));
  }
  SUBCASE("dissimilar consensus leaves the partition") {
    std::vector<AnnotatorSpec> ann{{"o", OracleAnnotator{singles}}};
    auto out = merge_pass(singles, cands, ann, ConsensusPolicy::Unanimous, claims);
    CHECK(out.partition == singles);
    CHECK(out.merges_accepted == 0);
  }
  SUBCASE("one dissenting annotator blocks a unanimous merge") {
    std::vector<AnnotatorSpec> ann{
        {"o1", OracleAnnotator{Partition::from_groups({{"x", "y"}, {"z"}})}},
        {"o2", OracleAnnotator{singles}}};
    auto out = merge_pass(singles, cands, ann, ConsensusPolicy::Unanimous, claims);
    CHECK(out.partition == singles);
  }
  SUBCASE("candidates must belong to the partition") {
    MergeCandidate bogus{"q", "x", 0.9, "q", "x"};
    std::vector<AnnotatorSpec> ann{{"o", OracleAnnotator{singles}}};
    std::vector<MergeCandidate> list{bogus};
    CHECK(kind_of([&] { merge_pass(singles, list, ann, ConsensusPolicy::Unanimous, claims); }) ==
          ErrorKind::UnknownClusterId);
  }
}

TEST_CASE("manual review and audit") {
  fixtures::TempDir tmp;
  EmbeddingSet e(2);
  std::vector<ClaimId> ids;
  for (int i = 0; i < 25; ++i) {
    ids.push_back(fixtures::id("big", i, 2));
    e.add(ids.back(), V{1, 0});
  }
  e.add("p", at_cosine(0.9));
  e.add("q", V{-1, 0});
  ids.push_back("p");
  ids.push_back("q");
  auto claims = claims_for(ids);
  std::vector<std::vector<ClaimId>> groups{std::vector<ClaimId>(ids.begin(), ids.begin() + 25),
                                           {"p"}, {"q"}};
  auto part = Partition::from_groups(groups);
  auto review = propose_manual_merges(part, e, claims);
  REQUIRE(review.rows.size() == 1);
  CHECK(review.rows[0].cluster_a == "big00");
  CHECK(review.rows[0].cluster_b == "p");
  CHECK(review.rows[0].similarity == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(review.rows[0].sample_text_a == "text of big00");
  REQUIRE(review.large_clusters.size() == 1);
  CHECK(review.large_clusters[0].size == 25);
  CHECK(propose_manual_merges(part, e, claims, 0.95).rows.empty());

  write_review(tmp / "review.tsv", review);
  write_audit(tmp / "audit.tsv", review);
  CHECK(io::read_text(tmp / "review.tsv") ==
        "cluster_a\tcluster_b\tsimilarity\tsample_text_a\tsample_text_b\n"
        "big00\tp\t0.900000\ttext of big00\ttext of p\n");
  CHECK(io::read_text(tmp / "audit.tsv") == "cluster_id\tsize\nbig00\t25\n");
}

TEST_CASE("apply manual merges") {
  auto p = Partition::from_groups({{"a"}, {"b"}, {"c"}, {"d"}});
  std::vector<std::pair<ClusterId, ClusterId>> one{{"a", "c"}};
  CHECK(apply_manual_merges(p, one).cluster_count() == 3);
  CHECK(apply_manual_merges(p, {}) == p);
  std::vector<std::pair<ClusterId, ClusterId>> chain{{"a", "b"}, {"b", "c"}};
  auto merged = apply_manual_merges(p, chain);
  CHECK(merged.members("a") == std::vector<ClaimId>{"a", "b", "c"});
  std::vector<std::pair<ClusterId, ClusterId>> bad{{"a", "zz"}};
  CHECK(kind_of([&] { apply_manual_merges(p, bad); }) == ErrorKind::UnknownClusterId);
}

TEST_CASE("property: merge passes coarsen, never merge across plants, count non-increasing") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto data = fixtures::planted(150, 15, seed, 32);
    ClaimTable claims(data.claims);
    std::mt19937_64 rng(seed);
    // Random fragmentation of every planted group.
    std::vector<std::vector<ClaimId>> frags;
    for (const auto& [_, members] : data.truth.clusters()) {
      std::vector<ClaimId> cur;
      for (const auto& m : members) {
        cur.push_back(m);
        if (rng() % 3 == 0) {
          frags.push_back(cur);
          cur.clear();
        }
      }
      if (!cur.empty()) frags.push_back(cur);
    }
    Partition p = Partition::from_groups(frags);
    std::vector<AnnotatorSpec> ann;
    for (const char* n : {"o1", "o2", "o3"}) ann.push_back({n, OracleAnnotator{data.truth}});
    PipelineParams params;
    params.merge_sim_threshold = 0.0;
    for (int pass = 0; pass < 3; ++pass) {
      auto cands = propose_merge_candidates(p, data.embeddings, params);
      auto out = merge_pass(p, cands, ann, ConsensusPolicy::Unanimous, claims);
      CHECK(is_coarsening(p, out.partition));
      CHECK(out.partition.cluster_count() <= p.cluster_count());
      CHECK(is_coarsening(out.partition, data.truth));
      p = out.partition;
    }
  }
}
