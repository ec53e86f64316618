#pragma once

// Straight-line reference implementations used only by tests. They work on
// plain label vectors and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Labels = std::vector<int>;

inline bool same_partition(const Labels& a, const Labels& b) {
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [it1, new1] = ab.emplace(a[i], b[i]);
    auto [it2, new2] = ba.emplace(b[i], a[i]);
    if (it1->second != b[i] || it2->second != a[i]) return false;
  }
  return true;
}

// Classifies every item pair.
inline double ari_pair_counting(const Labels& pred, const Labels& truth) {
  long double a = 0, b = 0, c = 0, d = 0;
  const std::size_t n = pred.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool sp = pred[i] == pred[j];
      const bool st = truth[i] == truth[j];
      if (sp && st) ++a;
      else if (sp) ++b;
      else if (st) ++c;
      else ++d;
    }
  }
  const long double den = (a + b) * (b + d) + (a + c) * (c + d);
  if (den == 0) return same_partition(pred, truth) ? 1.0 : 0.0;
  return static_cast<double>(2 * (a * d - b * c) / den);
}

inline double entropy(const Labels& x) {
  std::map<int, double> counts;
  for (int v : x) counts[v] += 1;
  const double n = static_cast<double>(x.size());
  double h = 0;
  for (auto& [_, c] : counts) h -= (c / n) * std::log(c / n);
  return h;
}

// H(X | Y)
inline double conditional_entropy(const Labels& x, const Labels& y) {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ycount;
  for (std::size_t i = 0; i < x.size(); ++i) {
    joint[{x[i], y[i]}] += 1;
    ycount[y[i]] += 1;
  }
  const double n = static_cast<double>(x.size());
  double h = 0;
  for (auto& [k, c] : joint) h -= (c / n) * std::log(c / ycount[k.second]);
  return h;
}

struct Hcv {
  double h, c, v;
};

inline Hcv hcv(const Labels& pred, const Labels& truth) {
  const double ht = entropy(truth), hp = entropy(pred);
  const double h = ht == 0 ? 1.0 : 1.0 - conditional_entropy(truth, pred) / ht;
  const double c = hp == 0 ? 1.0 : 1.0 - conditional_entropy(pred, truth) / hp;
  const double v = h + c == 0 ? 0.0 : 2 * h * c / (h + c);
  return {h, c, v};
}

inline double mutual_info(const Labels& p, const Labels& t) {
  return entropy(t) - conditional_entropy(t, p);
}

inline std::vector<long> marginal(const Labels& x) {
  std::map<int, long> counts;
  for (int v : x) ++counts[v];
  std::vector<long> out;
  for (auto& [_, c] : counts) out.push_back(c);
  return out;
}

inline long double log_factorial(long k) { return std::lgamma(static_cast<long double>(k) + 1); }

// Hypergeometric expectation, one term per (row, column, n_ij).
inline double expected_mutual_info(const Labels& p, const Labels& t) {
  const long n = static_cast<long>(p.size());
  const auto a = marginal(p);
  const auto b = marginal(t);
  long double emi = 0;
  for (long ai : a) {
    for (long bj : b) {
      for (long nij = std::max(1L, ai + bj - n); nij <= std::min(ai, bj); ++nij) {
        const long double term = static_cast<long double>(nij) / n *
                                 std::log(static_cast<long double>(n) * nij /
                                          (static_cast<long double>(ai) * bj));
        const long double logp = log_factorial(ai) + log_factorial(bj) +
                                 log_factorial(n - ai) + log_factorial(n - bj) -
                                 log_factorial(n) - log_factorial(nij) -
                                 log_factorial(ai - nij) - log_factorial(bj - nij) -
                                 log_factorial(n - ai - bj + nij);
        emi += term * std::exp(logp);
      }
    }
  }
  return static_cast<double>(emi);
}

inline double ami(const Labels& p, const Labels& t) {
  const double mi = mutual_info(p, t);
  const double emi = expected_mutual_info(p, t);
  const double mean_h = (entropy(p) + entropy(t)) / 2;
  const double den = mean_h - emi;
  if (std::abs(den) < 1e-10) return same_partition(p, t) ? 1.0 : 0.0;
  return (mi - emi) / den;
}

inline double purity(const Labels& pred, const Labels& truth) {
  std::map<int, std::map<int, long>> overlap;
  for (std::size_t i = 0; i < pred.size(); ++i) ++overlap[pred[i]][truth[i]];
  long total = 0;
  for (auto& [_, row] : overlap) {
    long best = 0;
    for (auto& [__, c] : row) best = std::max(best, c);
    total += best;
  }
  return static_cast<double>(total) / static_cast<double>(pred.size());
}

// Component label (smallest member index) per node, by breadth-first search.
inline std::vector<std::size_t> bfs_components(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<std::size_t> comp(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] != std::numeric_limits<std::size_t>::max()) continue;
    std::deque<std::size_t> queue{s};
    comp[s] = s;
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      for (auto v : adj[u]) {
        if (comp[v] == std::numeric_limits<std::size_t>::max()) {
          comp[v] = s;
          queue.push_back(v);
        }
      }
    }
  }
  return comp;
}

struct ApResult {
  std::vector<std::size_t> exemplar_of;  // per point
  std::vector<std::size_t> exemplars;
  std::size_t iterations = 0;
  bool converged = false;
};

// Affinity propagation's responsibility / availability updates written out
// element by element. `s` carries the preferences on its diagonal.
inline ApResult affinity_propagation(const std::vector<std::vector<double>>& s, double damping,
                                     std::size_t max_iter, std::size_t conv_iter) {
  const std::size_t n = s.size();
  std::vector<std::vector<double>> r(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<bool> last(n, false);
  std::size_t stable = 0;
  ApResult out;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t kk = 0; kk < n; ++kk) {
          if (kk != k) best = std::max(best, a[i][kk] + s[i][kk]);
        }
        r[i][k] = damping * r[i][k] + (1 - damping) * (s[i][k] - best);
      }
    }
    std::vector<std::vector<double>> a_new(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        double sum = 0;
        for (std::size_t ii = 0; ii < n; ++ii) {
          if (ii != i && ii != k) sum += std::max(0.0, r[ii][k]);
        }
        a_new[i][k] = i == k ? sum : std::min(0.0, r[k][k] + sum);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) a[i][k] = damping * a[i][k] + (1 - damping) * a_new[i][k];
    }
    std::vector<bool> ex(n);
    for (std::size_t k = 0; k < n; ++k) ex[k] = a[k][k] + r[k][k] > 0;
    stable = ex == last ? stable + 1 : 1;
    last = ex;
    if (stable >= conv_iter && std::count(ex.begin(), ex.end(), true) > 0) {
      out.converged = true;
      break;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (last[k]) out.exemplars.push_back(k);
  }
  out.exemplar_of.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (last[i]) {
      out.exemplar_of[i] = i;
      continue;
    }
    std::size_t best = out.exemplars.empty() ? i : out.exemplars.front();
    for (auto k : out.exemplars) {
      if (s[i][k] > s[i][best]) best = k;
    }
    out.exemplar_of[i] = best;
  }
  return out;
}

}  // namespace oracle
