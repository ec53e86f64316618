#include "claimnet/cluster_builder.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "claimnet/error.hpp"
#include "claimnet/io.hpp"
#include "claimnet/parallel.hpp"
#include "claimnet/union_find.hpp"
#include "claimnet/vecmath.hpp"

namespace claimnet {

namespace {

// Coarsens `partition` by joining clusters that `uf` (over cluster positions
// in partition.clusters() order) has united.
Partition coarsen(const Partition& partition, UnionFind& uf) {
  std::map<ClaimId, std::string> labels;
  std::size_t position = 0;
  for (const auto& [cluster, members] : partition.clusters()) {
    const std::string label = std::to_string(uf.find(position));
    for (const auto& id : members) labels.emplace(id, label);
    ++position;
  }
  return Partition(labels);
}

std::map<ClusterId, std::size_t> cluster_positions(const Partition& partition) {
  std::map<ClusterId, std::size_t> positions;
  std::size_t i = 0;
  for (const auto& [cluster, _] : partition.clusters()) positions.emplace(cluster, i++);
  return positions;
}

}  // namespace

Partition build_subclusters(std::span<const LabeledPair> pairs,
                            std::span<const ClaimId> universe) {
  std::map<std::string_view, std::size_t> index;
  for (const auto& id : universe) {
    if (!index.emplace(id, index.size()).second) {
      throw Error(ErrorKind::DuplicateId, "claim id '" + id + "' repeated in universe", {id});
    }
  }
  auto lookup = [&](const ClaimId& id) {
    auto it = index.find(id);
    if (it == index.end()) {
      throw Error(ErrorKind::UnknownClaimId,
                  "pair refers to claim '" + id + "' outside the universe", {id});
    }
    return it->second;
  };

  UnionFind uf(universe.size());
  for (const auto& p : pairs) {
    const std::size_t a = lookup(p.pair.first);
    const std::size_t b = lookup(p.pair.second);
    if (p.label == Label::Similar) uf.unite(a, b);
  }

  std::map<ClaimId, std::string> labels;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    labels.emplace(universe[i], std::to_string(uf.find(i)));
  }
  return Partition(labels);
}

ClusterCentroids compute_centroids(const Partition& partition, const EmbeddingSet& embeddings) {
  ClusterCentroids out;
  out.centroids = EmbeddingSet(embeddings.dim());
  for (const auto& [cluster, members] : partition.clusters()) {
    std::vector<std::span<const float>> vectors;
    vectors.reserve(members.size());
    for (const auto& id : members) vectors.push_back(embeddings.at(id));
    const auto mean = centroid(std::span<const std::span<const float>>(vectors));
    const double norm = l2_norm(mean);
    if (norm == 0.0) {
      throw Error(ErrorKind::ZeroVector, "centroid of cluster '" + cluster + "' is zero",
                  {cluster});
    }
    double best = -2.0;
    const ClaimId* representative = nullptr;
    for (std::size_t m = 0; m < members.size(); ++m) {
      // Members are in ascending id order, so strict > keeps the smallest id.
      const double s = detail::similarity_to_unit(mean, norm, vectors[m]);
      if (s > best) {
        best = s;
        representative = &members[m];
      }
    }
    out.clusters.push_back(cluster);
    out.centroids.add(cluster, mean);
    out.representatives.push_back(*representative);
  }
  return out;
}

std::vector<MergeCandidate> propose_merge_candidates(const Partition& partition,
                                                     const EmbeddingSet& embeddings,
                                                     const PipelineParams& params,
                                                     const CandidateSearchOptions& options) {
  params.validate();
  const ClusterCentroids cc = compute_centroids(partition, embeddings);
  const std::size_t n = cc.clusters.size();
  if (n < 2) return {};

  std::optional<HnswIndex> index;
  if (n > options.ann_cluster_threshold) {
    index = HnswIndex::build(cc.centroids, options.hnsw);
  }

  std::vector<std::vector<Neighbor>> neighbors(n);
  parallel_for(n, options.threads, [&](std::size_t i) {
    const auto query = cc.centroids.row(i);
    neighbors[i] = index ? index->query_knn(query, params.merge_top_k, cc.clusters[i])
                         : brute_force_knn(cc.centroids, query, params.merge_top_k,
                                           cc.clusters[i]);
  });

  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<MergeCandidate> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& nb : neighbors[i]) {
      const std::size_t j = *cc.centroids.index_of(nb.id);
      const std::size_t a = std::min(i, j);
      const std::size_t b = std::max(i, j);
      // Recomputed in canonical orientation so the value does not depend on
      // which side retrieved the pair.
      const auto ca = cc.centroids.row(a);
      const double sim = detail::similarity_to_unit(ca, l2_norm(ca), cc.centroids.row(b));
      if (sim < params.merge_sim_threshold) continue;
      if (!seen.emplace(a, b).second) continue;
      out.push_back(MergeCandidate{cc.clusters[a], cc.clusters[b], sim,
                                   cc.representatives[a], cc.representatives[b]});
    }
  }
  std::sort(out.begin(), out.end(), [](const MergeCandidate& x, const MergeCandidate& y) {
    return std::tie(x.cluster_a, x.cluster_b) < std::tie(y.cluster_a, y.cluster_b);
  });
  return out;
}

MergeOutcome merge_pass(const Partition& partition, std::span<const MergeCandidate> candidates,
                        std::span<const AnnotatorSpec> annotators, ConsensusPolicy policy,
                        const ClaimTable& claims, std::string_view stage) {
  const auto positions = cluster_positions(partition);
  std::map<PairKey, std::pair<std::size_t, std::size_t>> pair_to_clusters;
  std::vector<PairKey> pairs;
  for (const auto& c : candidates) {
    auto pa = positions.find(c.cluster_a);
    auto pb = positions.find(c.cluster_b);
    if (pa == positions.end() || pb == positions.end()) {
      const ClusterId& missing = pa == positions.end() ? c.cluster_a : c.cluster_b;
      throw Error(ErrorKind::UnknownClusterId,
                  "merge candidate names cluster '" + missing + "' not in the partition",
                  {missing});
    }
    if (partition.cluster_of(c.representative_a) != c.cluster_a ||
        partition.cluster_of(c.representative_b) != c.cluster_b) {
      throw Error(ErrorKind::InvalidArgument,
                  "representatives of candidate (" + c.cluster_a + ", " + c.cluster_b +
                      ") are not members of their clusters");
    }
    PairKey key = canonical_pair_key(c.representative_a, c.representative_b);
    if (pair_to_clusters.emplace(key, std::pair{pa->second, pb->second}).second) {
      pairs.push_back(std::move(key));
    }
  }

  MergeOutcome outcome;
  if (pairs.empty()) {
    outcome.partition = partition;
    return outcome;
  }
  outcome.verdicts = collect_verdicts(pairs, annotators, claims, stage);
  std::vector<std::string> roster;
  for (const auto& a : annotators) roster.push_back(a.name);
  outcome.decisions = aggregate_consensus(outcome.verdicts, policy, roster);

  UnionFind uf(partition.cluster_count());
  for (const auto& d : outcome.decisions) {
    if (d.label != Label::Similar) continue;
    const auto [a, b] = pair_to_clusters.at(d.pair);
    uf.unite(a, b);
    ++outcome.merges_accepted;
  }
  outcome.partition = coarsen(partition, uf);
  return outcome;
}

ManualReview propose_manual_merges(const Partition& partition, const EmbeddingSet& embeddings,
                                   const ClaimTable& claims, double threshold,
                                   std::size_t audit_size, unsigned threads) {
  ManualReview review;
  for (const auto& [cluster, members] : partition.clusters()) {
    if (members.size() > audit_size) review.large_clusters.push_back({cluster, members.size()});
  }
  std::stable_sort(review.large_clusters.begin(), review.large_clusters.end(),
                   [](const AuditRow& a, const AuditRow& b) { return a.size > b.size; });

  const ClusterCentroids cc = compute_centroids(partition, embeddings);
  const std::size_t n = cc.clusters.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> hits(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto ci = cc.centroids.row(i);
    const double norm = l2_norm(ci);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double sim = detail::similarity_to_unit(ci, norm, cc.centroids.row(j));
      if (sim > threshold) hits[i].emplace_back(j, sim);
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [j, sim] : hits[i]) {
      review.rows.push_back(ReviewRow{cc.clusters[i], cc.clusters[j], sim,
                                      english_or_original(claims.at(cc.representatives[i])),
                                      english_or_original(claims.at(cc.representatives[j]))});
    }
  }
  std::stable_sort(review.rows.begin(), review.rows.end(),
                   [](const ReviewRow& a, const ReviewRow& b) { return a.similarity > b.similarity; });
  return review;
}

void write_review(const std::filesystem::path& review_tsv, const ManualReview& review) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  out << "cluster_a\tcluster_b\tsimilarity\tsample_text_a\tsample_text_b\n";
  for (const auto& r : review.rows) {
    out << r.cluster_a << '\t' << r.cluster_b << '\t' << r.similarity << '\t'
        << io::tsv_cell(r.sample_text_a) << '\t' << io::tsv_cell(r.sample_text_b) << '\n';
  }
  io::write_text(review_tsv, out.str());
}

void write_audit(const std::filesystem::path& audit_tsv, const ManualReview& review) {
  std::ostringstream out;
  out << "cluster_id\tsize\n";
  for (const auto& a : review.large_clusters) out << a.cluster << '\t' << a.size << '\n';
  io::write_text(audit_tsv, out.str());
}

Partition apply_manual_merges(const Partition& partition,
                              std::span<const std::pair<ClusterId, ClusterId>> decisions) {
  const auto positions = cluster_positions(partition);
  UnionFind uf(partition.cluster_count());
  for (const auto& [a, b] : decisions) {
    for (const auto* id : {&a, &b}) {
      if (!positions.contains(*id)) {
        throw Error(ErrorKind::UnknownClusterId,
                    "merge decision names unknown cluster '" + *id + "'", {*id});
      }
    }
    uf.unite(positions.at(a), positions.at(b));
  }
  return coarsen(partition, uf);
}

}  // namespace claimnet
