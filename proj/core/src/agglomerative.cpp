#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "claimnet/baselines.hpp"
#include "claimnet/error.hpp"
#include "claimnet/union_find.hpp"
#include "claimnet/vecmath.hpp"

namespace claimnet {

std::string_view to_string(Linkage linkage) noexcept {
  switch (linkage) {
    case Linkage::Ward: return "ward";
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
    case Linkage::Single: return "single";
  }
  return "ward";
}

std::optional<Linkage> parse_linkage(std::string_view s) noexcept {
  if (s == "ward") return Linkage::Ward;
  if (s == "complete") return Linkage::Complete;
  if (s == "average") return Linkage::Average;
  if (s == "single") return Linkage::Single;
  return std::nullopt;
}

std::string_view to_string(DistanceMetric metric) noexcept {
  return metric == DistanceMetric::Euclidean ? "euclidean" : "cosine";
}

std::optional<DistanceMetric> parse_metric(std::string_view s) noexcept {
  if (s == "euclidean") return DistanceMetric::Euclidean;
  if (s == "cosine") return DistanceMetric::Cosine;
  return std::nullopt;
}

void AgglomerativeConfig::validate() const {
  if (!(distance_threshold > 0.0) || !std::isfinite(distance_threshold)) {
    throw Error(ErrorKind::InvalidArgument, "distance_threshold must be a positive real");
  }
  if (linkage == Linkage::Ward && metric != DistanceMetric::Euclidean) {
    throw Error(ErrorKind::WardMetricViolation, "ward linkage requires the euclidean metric");
  }
}

namespace {

class CondensedMatrix {
 public:
  explicit CondensedMatrix(std::size_t n) : n_(n), data_(n * (n - 1) / 2) {}
  double& operator()(std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return data_[i * n_ - i * (i + 1) / 2 + (j - i - 1)];
  }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

}  // namespace

Dendrogram agglomerative_dendrogram(const EmbeddingSet& embeddings, Linkage linkage,
                                    DistanceMetric metric) {
  if (embeddings.empty()) throw Error(ErrorKind::EmptyInput, "clustering zero points");
  if (linkage == Linkage::Ward && metric != DistanceMetric::Euclidean) {
    throw Error(ErrorKind::WardMetricViolation, "ward linkage requires the euclidean metric");
  }

  Dendrogram dendrogram;
  dendrogram.ids = embeddings.ids();
  std::sort(dendrogram.ids.begin(), dendrogram.ids.end());
  const std::size_t n = dendrogram.ids.size();
  if (n == 1) return dendrogram;

  std::vector<std::span<const float>> points;
  points.reserve(n);
  for (const auto& id : dendrogram.ids) points.push_back(embeddings.at(id));

  // Ward works on squared Euclidean distances and reports their root.
  const bool squared = linkage == Linkage::Ward;
  CondensedMatrix dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d;
      if (metric == DistanceMetric::Cosine) {
        d = 1.0 - cosine_similarity(points[i], points[j]);
      } else {
        double sq = 0.0;
        for (std::size_t c = 0; c < points[i].size(); ++c) {
          const double diff = static_cast<double>(points[i][c]) - points[j][c];
          sq += diff * diff;
        }
        d = squared ? sq : std::sqrt(sq);
      }
      dist(i, j) = d;
    }
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<char> active(n, 1);
  std::vector<std::size_t> size(n, 1);
  // Nearest active partner with a larger slot, smallest slot on ties.
  std::vector<std::size_t> nn(n, kNone);
  std::vector<double> nn_dist(n, kInf);

  auto refresh = [&](std::size_t i) {
    nn[i] = kNone;
    nn_dist[i] = kInf;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!active[j]) continue;
      const double d = dist(i, j);
      if (d < nn_dist[i]) {
        nn_dist[i] = d;
        nn[i] = j;
      }
    }
  };
  for (std::size_t i = 0; i + 1 < n; ++i) refresh(i);

  dendrogram.steps.reserve(n - 1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t a = kNone;
    double best = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      if (active[i] && nn[i] != kNone && nn_dist[i] < best) {
        best = nn_dist[i];
        a = i;
      }
    }
    const std::size_t b = nn[a];
    const double height = squared ? std::sqrt(std::max(0.0, best)) : best;
    const auto na = static_cast<double>(size[a]);
    const auto nb = static_cast<double>(size[b]);

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      const double dak = dist(a, k);
      const double dbk = dist(b, k);
      double updated = 0.0;
      switch (linkage) {
        case Linkage::Single: updated = std::min(dak, dbk); break;
        case Linkage::Complete: updated = std::max(dak, dbk); break;
        case Linkage::Average: updated = (na * dak + nb * dbk) / (na + nb); break;
        case Linkage::Ward: {
          const auto nk = static_cast<double>(size[k]);
          updated = ((na + nk) * dak + (nb + nk) * dbk - nk * best) / (na + nb + nk);
          break;
        }
      }
      dist(a, k) = updated;
    }
    active[b] = 0;
    size[a] += size[b];
    dendrogram.steps.push_back(MergeStep{a, b, height, size[a]});

    refresh(a);
    for (std::size_t k = 0; k < a; ++k) {
      if (!active[k]) continue;
      if (nn[k] == a || nn[k] == b) {
        refresh(k);
      } else {
        const double d = dist(k, a);
        if (d < nn_dist[k] || (d == nn_dist[k] && a < nn[k])) {
          nn_dist[k] = d;
          nn[k] = a;
        }
      }
    }
    for (std::size_t k = a + 1; k < b; ++k) {
      if (active[k] && nn[k] == b) refresh(k);
    }
  }
  return dendrogram;
}

Partition Dendrogram::cut(double threshold) const {
  UnionFind uf(ids.size());
  for (const auto& s : steps) {
    if (s.distance > threshold) break;
    uf.unite(s.slot_a, s.slot_b);
  }
  std::map<ClaimId, std::string> labels;
  for (std::size_t i = 0; i < ids.size(); ++i) labels.emplace(ids[i], std::to_string(uf.find(i)));
  return Partition(labels);
}

Partition agglomerative_cluster(const EmbeddingSet& embeddings,
                                const AgglomerativeConfig& config) {
  config.validate();
  return agglomerative_dendrogram(embeddings, config.linkage, config.metric)
      .cut(config.distance_threshold);
}

}  // namespace claimnet
