#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "claimnet/embedding_set.hpp"
#include "claimnet/model.hpp"

namespace claimnet {

struct HnswParams {
  std::size_t M = 16;                 // max links per node per layer (2M on layer 0)
  std::size_t ef_construction = 200;
  std::size_t ef_search = 100;
  std::uint64_t seed = 42;

  // Throws InvalidArgument.
  void validate() const;

  bool operator==(const HnswParams&) const = default;
};

struct Neighbor {
  ClaimId id;
  double similarity = 0.0;

  bool operator==(const Neighbor&) const = default;
};

// Hierarchical Navigable Small World graph over cosine similarity.
//
// Node levels are drawn as floor(-ln(u) / ln(M)) with u uniform on (0, 1]
// from a seeded mt19937_64, so equal seeds and insertion order give the same
// graph on every platform. Neighbor selection uses the diversity heuristic;
// all internal ties are broken by insertion row.
//
// Building is single-writer. A built index is safe for concurrent queries.
class HnswIndex {
 public:
  HnswIndex(std::size_t dim, HnswParams params = {});

  // Throws EmptyInput.
  static HnswIndex build(const EmbeddingSet& embeddings, HnswParams params = {});

  // Normalizes like EmbeddingSet::add and links the new node.
  void add(const ClaimId& id, std::span<const float> vector);

  // Up to k results, similarity non-increasing, ties by ascending claim id.
  // `exclude` is never returned. `ef` overrides params().ef_search.
  // Throws DimensionMismatch, ZeroVector.
  std::vector<Neighbor> query_knn(std::span<const float> query, std::size_t k,
                                  std::optional<std::string_view> exclude = {},
                                  std::optional<std::size_t> ef = {}) const;

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  std::size_t dim() const noexcept { return points_.dim(); }
  const HnswParams& params() const noexcept { return params_; }
  const EmbeddingSet& points() const noexcept { return points_; }

  std::optional<ClaimId> entry_point() const;
  int max_level() const noexcept { return max_level_; }
  int level_of(std::size_t row) const { return static_cast<int>(links_.at(row).size()) - 1; }
  std::span<const std::uint32_t> links(std::size_t row, int level) const;
  std::size_t max_links(int level) const noexcept {
    return level == 0 ? 2 * params_.M : params_.M;
  }

  // Binary cache of the graph. load() returns nullopt when the file is
  // missing or was written for different embeddings, params, or seed.
  void save(const std::filesystem::path& path) const;
  static std::optional<HnswIndex> load(const std::filesystem::path& path,
                                       const EmbeddingSet& embeddings,
                                       const HnswParams& params);

 private:
  struct Candidate {
    double similarity;
    std::uint32_t row;
  };
  struct Query {
    std::span<const float> vector;
    double norm;
  };

  int draw_level();
  double similarity(const Query& query, std::uint32_t row) const;
  std::vector<Candidate> search_layer(const Query& query,
                                      std::span<const Candidate> entries,
                                      std::size_t ef, int level) const;
  std::vector<std::uint32_t> select_neighbors(std::vector<Candidate> candidates,
                                              std::size_t m) const;

  HnswParams params_;
  double level_multiplier_;
  std::mt19937_64 rng_;
  EmbeddingSet points_;
  std::vector<double> norms_;
  // links_[row][level] = adjacency of `row` on `level`.
  std::vector<std::vector<std::vector<std::uint32_t>>> links_;
  std::uint32_t entry_ = 0;
  int max_level_ = -1;
};

// Exhaustive scan with the same contract as HnswIndex::query_knn.
// Throws EmptyInput, DimensionMismatch, ZeroVector.
std::vector<Neighbor> brute_force_knn(const EmbeddingSet& embeddings,
                                      std::span<const float> query, std::size_t k,
                                      std::optional<std::string_view> exclude = {});

namespace detail {
// Cosine similarity of `query` (norm precomputed) against a unit vector.
double similarity_to_unit(std::span<const float> query, double query_norm,
                          std::span<const float> unit);
void sort_neighbors(std::vector<Neighbor>& neighbors);
}  // namespace detail

}  // namespace claimnet
