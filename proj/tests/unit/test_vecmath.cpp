#include <doctest.h>

#include <cmath>
#include <random>

#include "claimnet/embedding_set.hpp"
#include "claimnet/error.hpp"
#include "claimnet/vecmath.hpp"
#include "fixtures.hpp"

using namespace claimnet;
using V = std::vector<float>;

namespace {
ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Io;
}
}  // namespace

TEST_CASE("cosine similarity examples") {
  CHECK(cosine_similarity(V{1, 0}, V{1, 0}) == doctest::Approx(1.0));
  CHECK(cosine_similarity(V{1, 0}, V{0, 1}) == doctest::Approx(0.0));
  // 1/sqrt(2) from the dot product by hand: (1*1 + 1*0) / (sqrt(2) * 1).
  const double expected = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(cosine_similarity(V{1, 1}, V{1, 0}) - expected) < 1e-4);
  CHECK(kind_of([] { cosine_similarity(V{1, 0}, V{1, 0, 0}); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { cosine_similarity(V{0, 0}, V{1, 0}); }) == ErrorKind::ZeroVector);
}

TEST_CASE("cosine clamps rounding") {
  V v{0.1f, 0.2f, 0.3f};
  const double c = cosine_similarity(v, v);
  CHECK(c <= 1.0);
  CHECK(c == doctest::Approx(1.0));
}

TEST_CASE("l2_normalize") {
  auto u = l2_normalize(V{3, 4});
  CHECK(u[0] == doctest::Approx(0.6));
  CHECK(u[1] == doctest::Approx(0.8));
  CHECK(kind_of([] { l2_normalize(V{0, 0}); }) == ErrorKind::ZeroVector);
  auto again = l2_normalize(u);
  CHECK(again[0] == doctest::Approx(u[0]).epsilon(1e-7));
  CHECK(l2_norm(again) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("centroid") {
  std::vector<V> two{{1, 0}, {0, 1}};
  CHECK(centroid(two) == V{0.5f, 0.5f});
  std::vector<V> one{{0.3f, -2.0f}};
  CHECK(centroid(one) == one[0]);
  std::vector<V> anti{{1, 0}, {-1, 0}};
  const auto zero = centroid(anti);
  CHECK(zero == V{0, 0});
  CHECK(kind_of([&] { cosine_similarity(zero, V{1, 0}); }) == ErrorKind::ZeroVector);
  CHECK(kind_of([] { centroid(std::vector<V>{}); }) == ErrorKind::EmptyInput);
  CHECK(kind_of([] { centroid(std::vector<V>{{1, 0}, {1}}); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("property: vector identities") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 300; ++trial) {
    auto u = fixtures::gaussian(rng, 16);
    auto v = fixtures::gaussian(rng, 16);
    CHECK(cosine_similarity(u, v) == doctest::Approx(cosine_similarity(v, u)).epsilon(1e-12));
    V cu = u;
    const double c = scale(rng);
    for (auto& x : cu) x = static_cast<float>(x * c);
    CHECK(cosine_similarity(u, cu) == doctest::Approx(1.0).epsilon(1e-6));

    std::vector<V> copies(1 + trial % 5, v);
    const auto m = centroid(copies);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(m[i] == doctest::Approx(v[i]).epsilon(1e-6));

    const auto nu = l2_normalize(u), nv = l2_normalize(v);
    CHECK(std::abs(cosine_similarity(nu, nv) - dot(nu, nv)) < 1e-6);
  }
}
