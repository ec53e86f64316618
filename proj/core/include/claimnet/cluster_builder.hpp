#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "claimnet/ann_index.hpp"
#include "claimnet/embedding_set.hpp"
#include "claimnet/model.hpp"
#include "claimnet/pair_pipeline.hpp"

namespace claimnet {

// Connected components of the SIMILAR pairs over `universe`; claims in no
// SIMILAR pair are singletons. DISSIMILAR pairs are ignored.
// Throws UnknownClaimId, DuplicateId.
Partition build_subclusters(std::span<const LabeledPair> pairs,
                            std::span<const ClaimId> universe);

struct ClusterCentroids {
  std::vector<ClusterId> clusters;        // partition order
  EmbeddingSet centroids;                 // keyed by cluster id, unit norm
  std::vector<ClaimId> representatives;   // member closest to the centroid
};

// Mean member embedding per cluster. The representative is the member with
// the highest cosine to the centroid, ties to the smallest claim id.
// Throws UnknownClaimId, ZeroVector (a centroid that averages to zero).
ClusterCentroids compute_centroids(const Partition& partition, const EmbeddingSet& embeddings);

struct MergeCandidate {
  ClusterId cluster_a;  // cluster_a < cluster_b
  ClusterId cluster_b;
  double centroid_similarity = 0.0;
  ClaimId representative_a;
  ClaimId representative_b;

  bool operator==(const MergeCandidate&) const = default;
};

struct CandidateSearchOptions {
  // Above this many clusters the centroid search goes through HNSW;
  // at or below it an exact scan is used.
  std::size_t ann_cluster_threshold = 5000;
  HnswParams hnsw{};
  unsigned threads = 1;
};

// Each cluster's centroid is matched against the other centroids (top
// params.merge_top_k); pairs below params.merge_sim_threshold are dropped and
// every unordered cluster pair is reported once, sorted by (cluster_a, cluster_b).
std::vector<MergeCandidate> propose_merge_candidates(const Partition& partition,
                                                     const EmbeddingSet& embeddings,
                                                     const PipelineParams& params,
                                                     const CandidateSearchOptions& options = {});

struct MergeOutcome {
  Partition partition;
  std::vector<Verdict> verdicts;
  std::vector<LabeledPair> decisions;  // one per candidate's representative pair
  std::size_t merges_accepted = 0;
};

// Sends every candidate's representative pair through the annotators and
// joins the two clusters on a SIMILAR consensus. Never splits a cluster.
MergeOutcome merge_pass(const Partition& partition, std::span<const MergeCandidate> candidates,
                        std::span<const AnnotatorSpec> annotators, ConsensusPolicy policy,
                        const ClaimTable& claims, std::string_view stage = "merge-1");

struct ReviewRow {
  ClusterId cluster_a;
  ClusterId cluster_b;
  double similarity = 0.0;
  std::string sample_text_a;
  std::string sample_text_b;
};

struct AuditRow {
  ClusterId cluster;
  std::size_t size = 0;
};

struct ManualReview {
  std::vector<ReviewRow> rows;           // similarity descending
  std::vector<AuditRow> large_clusters;  // size descending
};

// All unordered cluster pairs whose centroid cosine exceeds `threshold`, with
// representative texts, plus every cluster larger than `audit_size`. Reads
// only; the partition is not touched.
ManualReview propose_manual_merges(const Partition& partition, const EmbeddingSet& embeddings,
                                   const ClaimTable& claims, double threshold = 0.75,
                                   std::size_t audit_size = 20, unsigned threads = 1);

void write_review(const std::filesystem::path& review_tsv, const ManualReview& review);
void write_audit(const std::filesystem::path& audit_tsv, const ManualReview& review);

// Throws UnknownClusterId.
Partition apply_manual_merges(const Partition& partition,
                              std::span<const std::pair<ClusterId, ClusterId>> decisions);

}  // namespace claimnet
