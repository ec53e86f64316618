#include "claimnet/vecmath.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "claimnet/error.hpp"

namespace claimnet {

namespace {

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch,
                "vector dimensions differ: " + std::to_string(a) + " vs " +
                    std::to_string(b));
  }
}

}  // namespace

double dot(std::span<const float> u, std::span<const float> v) {
  require_same_dim(u.size(), v.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    acc += static_cast<double>(u[i]) * static_cast<double>(v[i]);
  }
  return acc;
}

double l2_norm(std::span<const float> v) noexcept {
  double acc = 0.0;
  for (float x : v) acc += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(acc);
}

double cosine_similarity(std::span<const float> u, std::span<const float> v) {
  require_same_dim(u.size(), v.size());
  const double nu = l2_norm(u);
  const double nv = l2_norm(v);
  if (nu == 0.0 || nv == 0.0) {
    throw Error(ErrorKind::ZeroVector, "cosine similarity of a zero vector");
  }
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

std::vector<float> l2_normalize(std::span<const float> v) {
  const double n = l2_norm(v);
  if (n == 0.0 || !std::isfinite(n)) {
    throw Error(ErrorKind::ZeroVector, "cannot normalize a zero vector");
  }
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = static_cast<float>(static_cast<double>(v[i]) / n);
  }
  return out;
}

std::vector<float> centroid(std::span<const std::span<const float>> vectors) {
  if (vectors.empty()) {
    throw Error(ErrorKind::EmptyInput, "centroid of an empty set");
  }
  const std::size_t dim = vectors.front().size();
  std::vector<double> sum(dim, 0.0);
  for (const auto& v : vectors) {
    require_same_dim(dim, v.size());
    for (std::size_t i = 0; i < dim; ++i) sum[i] += v[i];
  }
  std::vector<float> out(dim);
  const double count = static_cast<double>(vectors.size());
  for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(sum[i] / count);
  return out;
}

std::vector<float> centroid(std::span<const std::vector<float>> vectors) {
  std::vector<std::span<const float>> views(vectors.begin(), vectors.end());
  return centroid(std::span<const std::span<const float>>(views));
}

}  // namespace claimnet
