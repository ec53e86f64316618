#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "claimnet/embedding_set.hpp"
#include "claimnet/model.hpp"

namespace claimnet {

enum class Linkage { Ward, Complete, Average, Single };
enum class DistanceMetric { Euclidean, Cosine };

std::string_view to_string(Linkage linkage) noexcept;
std::optional<Linkage> parse_linkage(std::string_view s) noexcept;
std::string_view to_string(DistanceMetric metric) noexcept;
std::optional<DistanceMetric> parse_metric(std::string_view s) noexcept;

struct AgglomerativeConfig {
  Linkage linkage = Linkage::Ward;
  double distance_threshold = 1.0;
  DistanceMetric metric = DistanceMetric::Euclidean;

  // Throws InvalidArgument, WardMetricViolation.
  void validate() const;
};

// One merge of the full bottom-up hierarchy. Slots index the points sorted
// by claim id; the merged cluster keeps the smaller slot.
struct MergeStep {
  std::size_t slot_a;
  std::size_t slot_b;
  double distance;
  std::size_t size;  // members after the merge
};

struct Dendrogram {
  std::vector<ClaimId> ids;  // ascending
  std::vector<MergeStep> steps;

  // Applies merges in order until the next one exceeds `threshold`.
  Partition cut(double threshold) const;
};

// Full merge sequence with Lance-Williams updates over a dense pairwise
// matrix: O(n^2) memory, O(n^2) typical and O(n^3) worst-case time. Ward
// heights follow the usual convention (two singletons merge at their
// Euclidean distance). Equal distances go to the smallest (slot_a, slot_b).
// Throws EmptyInput, WardMetricViolation.
Dendrogram agglomerative_dendrogram(const EmbeddingSet& embeddings, Linkage linkage,
                                    DistanceMetric metric = DistanceMetric::Euclidean);

Partition agglomerative_cluster(const EmbeddingSet& embeddings,
                                const AgglomerativeConfig& config = {});

struct AffinityPropagationConfig {
  double damping = 0.9;
  std::optional<double> preference;  // nullopt: median off-diagonal similarity
  std::size_t max_iterations = 500;
  std::size_t convergence_window = 50;

  // Throws InvalidArgument.
  void validate() const;
};

struct AffinityPropagationResult {
  Partition partition;
  std::vector<ClaimId> exemplars;  // ascending
  bool converged = false;
  std::size_t iterations = 0;
  double preference = 0.0;
};

// Responsibility/availability message passing over the cosine similarity
// matrix with the preference on the diagonal. Stops once the exemplar set
// has been stable for convergence_window iterations or at max_iterations;
// an unconverged run is flagged, not rejected. Points go to their most
// similar exemplar; exemplars are their own cluster. If no exemplar emerges
// every point is left a singleton.
// Throws EmptyInput, InvalidArgument.
AffinityPropagationResult affinity_propagation(const EmbeddingSet& embeddings,
                                               const AffinityPropagationConfig& config = {});

}  // namespace claimnet
