#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "claimnet/baselines.hpp"
#include "claimnet/error.hpp"
#include "claimnet/vecmath.hpp"

namespace claimnet {

void AffinityPropagationConfig::validate() const {
  if (!(damping >= 0.5 && damping < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "damping must lie in [0.5, 1)");
  }
  if (max_iterations < 1 || convergence_window < 1) {
    throw Error(ErrorKind::InvalidArgument,
                "max_iterations and convergence_window must be >= 1");
  }
  if (preference && !std::isfinite(*preference)) {
    throw Error(ErrorKind::InvalidArgument, "preference must be finite");
  }
}

namespace {

double median(std::vector<double> values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

}  // namespace

AffinityPropagationResult affinity_propagation(const EmbeddingSet& embeddings,
                                               const AffinityPropagationConfig& config) {
  config.validate();
  if (embeddings.empty()) throw Error(ErrorKind::EmptyInput, "clustering zero points");

  std::vector<ClaimId> ids = embeddings.ids();
  std::sort(ids.begin(), ids.end());
  const std::size_t n = ids.size();

  AffinityPropagationResult result;
  if (n == 1) {
    result.partition = Partition::singletons(ids);
    result.exemplars = ids;
    result.converged = true;
    result.preference = config.preference.value_or(0.0);
    return result;
  }

  std::vector<std::span<const float>> points;
  points.reserve(n);
  for (const auto& id : ids) points.push_back(embeddings.at(id));

  std::vector<double> S(n * n);
  std::vector<double> off_diagonal;
  off_diagonal.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (i == k) continue;
      S[i * n + k] = cosine_similarity(points[i], points[k]);
      off_diagonal.push_back(S[i * n + k]);
    }
  }
  result.preference = config.preference ? *config.preference : median(std::move(off_diagonal));
  for (std::size_t i = 0; i < n; ++i) S[i * n + i] = result.preference;

  std::vector<double> R(n * n, 0.0);
  std::vector<double> A(n * n, 0.0);
  std::vector<double> scratch(n * n);
  const double lambda = config.damping;
  const std::size_t window = config.convergence_window;
  // Rolling record of the exemplar indicator over the last `window` rounds.
  std::vector<std::vector<char>> history(window, std::vector<char>(n, 0));
  std::vector<char> exemplar(n, 0);

  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    // Responsibilities: r(i,k) = s(i,k) - max_{k' != k} (a(i,k') + s(i,k')).
    for (std::size_t i = 0; i < n; ++i) {
      double first = -std::numeric_limits<double>::infinity();
      double second = first;
      std::size_t arg = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const double v = A[i * n + k] + S[i * n + k];
        if (v > first) {
          second = first;
          first = v;
          arg = k;
        } else if (v > second) {
          second = v;
        }
      }
      for (std::size_t k = 0; k < n; ++k) {
        const double fresh = S[i * n + k] - (k == arg ? second : first);
        R[i * n + k] = lambda * R[i * n + k] + (1.0 - lambda) * fresh;
      }
    }
    // Availabilities: a(i,k) = min(0, r(k,k) + sum_{i' not in {i,k}} max(0, r(i',k)));
    // a(k,k) = sum_{i' != k} max(0, r(i',k)).
    for (std::size_t k = 0; k < n; ++k) {
      double column = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = R[i * n + k];
        scratch[i * n + k] = i == k ? r : std::max(0.0, r);
        column += scratch[i * n + k];
      }
      for (std::size_t i = 0; i < n; ++i) {
        double fresh = column - scratch[i * n + k];
        if (i != k) fresh = std::min(0.0, fresh);
        A[i * n + k] = lambda * A[i * n + k] + (1.0 - lambda) * fresh;
      }
    }

    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
      exemplar[k] = (A[k * n + k] + R[k * n + k]) > 0.0 ? 1 : 0;
      count += static_cast<std::size_t>(exemplar[k]);
    }
    history[it % window] = exemplar;
    result.iterations = it + 1;

    if (it >= window) {
      bool stable = true;
      for (std::size_t k = 0; k < n && stable; ++k) {
        std::size_t on = 0;
        for (const auto& h : history) on += static_cast<std::size_t>(h[k]);
        stable = on == 0 || on == window;
      }
      if (stable && count > 0) {
        result.converged = true;
        break;
      }
    }
  }

  std::vector<std::size_t> exemplars;
  for (std::size_t k = 0; k < n; ++k) {
    if (exemplar[k]) exemplars.push_back(k);
  }
  if (exemplars.empty()) {
    result.partition = Partition::singletons(ids);
    result.converged = false;
    return result;
  }

  std::map<ClaimId, std::string> labels;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t chosen = exemplars.front();
    if (exemplar[i]) {
      chosen = i;
    } else {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t k : exemplars) {
        if (S[i * n + k] > best) {
          best = S[i * n + k];
          chosen = k;
        }
      }
    }
    labels.emplace(ids[i], ids[chosen]);
  }
  result.partition = Partition(labels);
  for (std::size_t k : exemplars) result.exemplars.push_back(ids[k]);
  return result;
}

}  // namespace claimnet
