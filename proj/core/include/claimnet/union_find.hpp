#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace claimnet {

// Disjoint sets over [0, n) with union by rank and path compression.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0);

  std::size_t find(std::size_t x);
  // Returns false when x and y were already joined.
  bool unite(std::size_t x, std::size_t y);
  bool connected(std::size_t x, std::size_t y) { return find(x) == find(y); }

  std::size_t size() const noexcept { return parent_.size(); }
  std::size_t component_count() const noexcept { return components_; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
  std::size_t components_;
};

}  // namespace claimnet
