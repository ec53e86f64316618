#pragma once

#include <span>
#include <vector>

namespace claimnet {

// Dot product accumulated in double. Throws DimensionMismatch.
double dot(std::span<const float> u, std::span<const float> v);

double l2_norm(std::span<const float> v) noexcept;

// dot(u,v) / (|u| |v|), clamped to [-1, 1].
// Throws DimensionMismatch, ZeroVector.
double cosine_similarity(std::span<const float> u, std::span<const float> v);

// Throws ZeroVector.
std::vector<float> l2_normalize(std::span<const float> v);

// Component-wise arithmetic mean; not re-normalized.
// Throws EmptyInput, DimensionMismatch.
std::vector<float> centroid(std::span<const std::span<const float>> vectors);
std::vector<float> centroid(std::span<const std::vector<float>> vectors);

}  // namespace claimnet
