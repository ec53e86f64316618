#pragma once

// Synthetic data shared by unit tests and the acceptance binary.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "claimnet/embedding_set.hpp"
#include "claimnet/model.hpp"
#include "oracles.hpp"

namespace fixtures {

using namespace claimnet;

// Zero-padded id so lexicographic order equals numeric order.
inline std::string id(const char* prefix, std::size_t i, int width = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

inline std::vector<float> gaussian(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(g(rng));
  return v;
}

inline std::vector<float> unit(std::vector<float> v) {
  double s = 0;
  for (float x : v) s += double(x) * x;
  const double n = std::sqrt(s);
  for (auto& x : v) x = static_cast<float>(x / n);
  return v;
}

inline double cosine(const std::vector<float>& a, const std::vector<float>& b) {
  double d = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += double(a[i]) * b[i];
    na += double(a[i]) * a[i];
    nb += double(b[i]) * b[i];
  }
  return d / std::sqrt(na * nb);
}

// Random unit vectors with ids v0000...
inline EmbeddingSet random_unit_set(std::size_t n, std::size_t dim, std::uint64_t seed,
                                    const char* prefix = "v") {
  std::mt19937_64 rng(seed);
  EmbeddingSet set(dim);
  for (std::size_t i = 0; i < n; ++i) set.add(id(prefix, i), unit(gaussian(rng, dim)));
  return set;
}

inline std::vector<int> random_labels(std::mt19937_64& rng, std::size_t n,
                                     int max_clusters) {
  std::uniform_int_distribution<int> k_dist(1, max_clusters);
  const int k = k_dist(rng);
  std::uniform_int_distribution<int> label(0, k - 1);
  std::vector<int> out(n);
  for (auto& l : out) l = label(rng);
  return out;
}

inline Partition partition_from_labels(const std::vector<int>& labels, const char* prefix = "i") {
  std::map<ClaimId, std::string> m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    m.emplace(id(prefix, i, 3), std::to_string(labels[i]));
  }
  return Partition(m);
}

// Well-separated clusters around orthonormal centers.
struct Planted {
  std::vector<Claim> claims;
  EmbeddingSet embeddings;
  Partition truth;
  double min_intra = 1.0;  // smallest cosine inside a group
  double max_inter = -1.0; // largest cosine across groups
};

inline Planted planted(std::size_t n_claims, std::size_t n_clusters, std::uint64_t seed,
                       std::size_t dim = 128, double noise = 0.25) {
  std::mt19937_64 rng(seed);
  // Orthonormal centers by Gram-Schmidt.
  std::vector<std::vector<float>> centers;
  while (centers.size() < n_clusters) {
    auto v = gaussian(rng, dim);
    for (const auto& c : centers) {
      double d = 0;
      for (std::size_t i = 0; i < dim; ++i) d += double(v[i]) * c[i];
      for (std::size_t i = 0; i < dim; ++i) v[i] = static_cast<float>(v[i] - d * c[i]);
    }
    centers.push_back(unit(v));
  }
  // Sizes: 2 each, then the remainder spread uniformly at random.
  std::vector<std::size_t> sizes(n_clusters, 2);
  std::uniform_int_distribution<std::size_t> pick(0, n_clusters - 1);
  for (std::size_t r = 2 * n_clusters; r < n_claims; ++r) ++sizes[pick(rng)];

  static const char* kLangs[] = {"en", "es", "fr", "de", "pt", "hi", "ar"};
  Planted out{{}, EmbeddingSet(dim), {}, 1.0, -1.0};
  std::vector<std::vector<float>> vecs;
  std::vector<std::size_t> group;
  std::map<ClaimId, std::string> labels;
  std::size_t next = 0;
  for (std::size_t g = 0; g < n_clusters; ++g) {
    for (std::size_t m = 0; m < sizes[g]; ++m) {
      std::vector<float> v;
      // Resample until the point sits close to its own center.
      do {
        auto e = unit(gaussian(rng, dim));
        v = centers[g];
        for (std::size_t i = 0; i < dim; ++i) v[i] += static_cast<float>(noise * e[i]);
        v = unit(v);
      } while (cosine(v, centers[g]) < 0.96);
      const auto cid = id("c", next++);
      Claim c;
      c.id = cid;
      c.text = "planted claim " + std::to_string(next) + " of group " + std::to_string(g);
      c.language = kLangs[(g + m) % 7];
      char date[16];
      std::snprintf(date, sizeof date, "2021-%02zu-%02zu", 1 + g % 12, 1 + m % 28);
      c.published_at = date;
      out.claims.push_back(c);
      out.embeddings.add(cid, v);
      labels.emplace(cid, std::to_string(g));
      vecs.push_back(v);
      group.push_back(g);
    }
  }
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    for (std::size_t j = i + 1; j < vecs.size(); ++j) {
      const double c = cosine(vecs[i], vecs[j]);
      if (group[i] == group[j]) out.min_intra = std::min(out.min_intra, c);
      else out.max_inter = std::max(out.max_inter, c);
    }
  }
  out.truth = Partition(labels);
  return out;
}

// Claims and partition with known summary statistics:
// 197 clusters over 1187 claims (1 x 28, 179 x 6, 17 x 5), 22 languages,
// 55 single-language clusters and 142 multilingual ones (114 with three
// languages, 28 with four).
struct StatsFixture {
  std::vector<Claim> claims;
  Partition partition;
};

inline StatsFixture table_fixture() {
  std::vector<std::size_t> sizes{28};
  sizes.insert(sizes.end(), 179, 6);
  sizes.insert(sizes.end(), 17, 5);
  std::vector<std::string> langs;
  for (char a = 'a'; langs.size() < 22; ++a) langs.push_back(std::string("x") + a);

  StatsFixture f;
  std::vector<std::vector<ClaimId>> groups;
  std::size_t next = 0, rotate = 0;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    // Clusters 0..54 single-language, 55..168 three languages, 169..196 four.
    const std::size_t n_lang = g < 55 ? 1 : (g < 169 ? 3 : 4);
    std::vector<ClaimId> members;
    for (std::size_t m = 0; m < sizes[g]; ++m) {
      Claim c;
      c.id = id("t", next++);
      c.text = "claim " + c.id;
      c.language = langs[(rotate + m % n_lang) % langs.size()];
      f.claims.push_back(c);
      members.push_back(c.id);
    }
    rotate += n_lang;
    groups.push_back(members);
  }
  f.partition = Partition::from_groups(groups);
  return f;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("claimnet-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
