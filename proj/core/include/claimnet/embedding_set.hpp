#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "claimnet/model.hpp"

namespace claimnet {

// Dense unit-norm vectors keyed by claim id, stored row-major in insertion
// order. Vectors are L2-normalized on ingest; a vector already of unit norm
// within kUnitTolerance is stored verbatim so that save/load is lossless.
class EmbeddingSet {
 public:
  static constexpr double kUnitTolerance = 1e-6;

  EmbeddingSet() = default;
  // Throws InvalidArgument when dim == 0.
  explicit EmbeddingSet(std::size_t dim);

  // Throws DimensionMismatch, NonFiniteValue, ZeroVector, DuplicateId.
  void add(const ClaimId& id, std::span<const float> vector);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  const std::vector<ClaimId>& ids() const noexcept { return ids_; }
  const ClaimId& id(std::size_t row) const { return ids_.at(row); }
  std::span<const float> row(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }

  std::optional<std::size_t> index_of(std::string_view id) const;
  bool contains(std::string_view id) const { return index_of(id).has_value(); }
  // Throws UnknownClaimId.
  std::span<const float> at(std::string_view id) const;

  // Rows for `ids` in the given order. Throws UnknownClaimId.
  EmbeddingSet subset(std::span<const ClaimId> ids) const;

  // FNV-1a over dim, ids, and raw vector bytes.
  std::uint64_t digest() const noexcept;

  bool operator==(const EmbeddingSet& other) const {
    return dim_ == other.dim_ && ids_ == other.ids_ && data_ == other.data_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<ClaimId> ids_;
  std::vector<float> data_;
  std::map<std::string, std::size_t, std::less<>> rows_;
};

}  // namespace claimnet
