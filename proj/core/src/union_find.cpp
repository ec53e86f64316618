#include "claimnet/union_find.hpp"

#include <numeric>
#include <string>

#include "claimnet/error.hpp"

namespace claimnet {

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_(n, 0), components_(n) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t x) {
  if (x >= parent_.size()) {
    throw Error(ErrorKind::InvalidArgument, "union-find element " + std::to_string(x) +
                                                " out of range");
  }
  std::size_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const std::size_t next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

bool UnionFind::unite(std::size_t x, std::size_t y) {
  std::size_t rx = find(x);
  std::size_t ry = find(y);
  if (rx == ry) return false;
  if (rank_[rx] < rank_[ry]) std::swap(rx, ry);
  parent_[ry] = rx;
  if (rank_[rx] == rank_[ry]) ++rank_[rx];
  --components_;
  return true;
}

}  // namespace claimnet
