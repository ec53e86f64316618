#include <algorithm>

#include "claimnet/ann_index.hpp"
#include "claimnet/error.hpp"
#include "claimnet/vecmath.hpp"

namespace claimnet {

namespace detail {

double similarity_to_unit(std::span<const float> query, double query_norm,
                          std::span<const float> unit) {
  return std::clamp(dot(query, unit) / query_norm, -1.0, 1.0);
}

void sort_neighbors(std::vector<Neighbor>& neighbors) {
  std::sort(neighbors.begin(), neighbors.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.similarity > b.similarity || (a.similarity == b.similarity && a.id < b.id);
  });
}

}  // namespace detail

std::vector<Neighbor> brute_force_knn(const EmbeddingSet& embeddings,
                                      std::span<const float> query, std::size_t k,
                                      std::optional<std::string_view> exclude) {
  if (embeddings.empty()) {
    throw Error(ErrorKind::EmptyInput, "nearest-neighbor scan over zero vectors");
  }
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  if (query.size() != embeddings.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "query has " + std::to_string(query.size()) + " components, set has " +
                    std::to_string(embeddings.dim()));
  }
  const double norm = l2_norm(query);
  if (norm == 0.0) throw Error(ErrorKind::ZeroVector, "query vector is all zeros");

  std::vector<Neighbor> all;
  all.reserve(embeddings.size());
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    const ClaimId& id = embeddings.id(i);
    if (exclude && id == *exclude) continue;
    all.push_back(Neighbor{id, detail::similarity_to_unit(query, norm, embeddings.row(i))});
  }
  const std::size_t keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                    [](const Neighbor& a, const Neighbor& b) {
                      return a.similarity > b.similarity ||
                             (a.similarity == b.similarity && a.id < b.id);
                    });
  all.resize(keep);
  return all;
}

}  // namespace claimnet
