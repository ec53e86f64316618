#include "claimnet/embedding_set.hpp"

#include <cmath>
#include <cstring>

#include "claimnet/error.hpp"
#include "claimnet/vecmath.hpp"

namespace claimnet {

EmbeddingSet::EmbeddingSet(std::size_t dim) : dim_(dim) {
  if (dim == 0) {
    throw Error(ErrorKind::InvalidArgument, "embedding dimension must be positive");
  }
}

void EmbeddingSet::add(const ClaimId& id, std::span<const float> vector) {
  if (vector.size() != dim_) {
    throw Error(ErrorKind::DimensionMismatch,
                "embedding for '" + id + "' has " + std::to_string(vector.size()) +
                    " components, expected " + std::to_string(dim_),
                {id});
  }
  for (float x : vector) {
    if (!std::isfinite(x)) {
      throw Error(ErrorKind::NonFiniteValue,
                  "embedding for '" + id + "' has a non-finite component", {id});
    }
  }
  if (rows_.contains(id)) {
    throw Error(ErrorKind::DuplicateId, "duplicate embedding id '" + id + "'", {id});
  }
  const double n = l2_norm(vector);
  if (n == 0.0) {
    throw Error(ErrorKind::ZeroVector, "embedding for '" + id + "' is all zeros", {id});
  }
  rows_.emplace(id, ids_.size());
  ids_.push_back(id);
  if (std::abs(n - 1.0) <= kUnitTolerance) {
    data_.insert(data_.end(), vector.begin(), vector.end());
  } else {
    const auto unit = l2_normalize(vector);
    data_.insert(data_.end(), unit.begin(), unit.end());
  }
}

std::optional<std::size_t> EmbeddingSet::index_of(std::string_view id) const {
  auto it = rows_.find(id);
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

std::span<const float> EmbeddingSet::at(std::string_view id) const {
  if (auto i = index_of(id)) return row(*i);
  throw Error(ErrorKind::UnknownClaimId,
              "no embedding for claim '" + std::string(id) + "'", {std::string(id)});
}

EmbeddingSet EmbeddingSet::subset(std::span<const ClaimId> ids) const {
  EmbeddingSet out(dim_);
  out.data_.reserve(ids.size() * dim_);
  for (const auto& id : ids) {
    auto src = at(id);
    if (!out.rows_.emplace(id, out.ids_.size()).second) {
      throw Error(ErrorKind::DuplicateId, "duplicate id '" + id + "' in subset", {id});
    }
    out.ids_.push_back(id);
    out.data_.insert(out.data_.end(), src.begin(), src.end());
  }
  return out;
}

std::uint64_t EmbeddingSet::digest() const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  const std::uint64_t d = dim_;
  mix(&d, sizeof d);
  for (const auto& id : ids_) {
    mix(id.data(), id.size());
    const char sep = '\0';
    mix(&sep, 1);
  }
  mix(data_.data(), data_.size() * sizeof(float));
  return h;
}

}  // namespace claimnet
