#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "claimnet/ann_index.hpp"
#include "claimnet/baselines.hpp"
#include "claimnet/metrics.hpp"
#include "claimnet/union_find.hpp"

using namespace claimnet;

namespace {

EmbeddingSet random_set(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g;
  EmbeddingSet s(dim);
  std::vector<float> v(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : v) x = g(rng);
    s.add("v" + std::to_string(i), v);
  }
  return s;
}

void BM_HnswBuild(benchmark::State& state) {
  const auto s = random_set(static_cast<std::size_t>(state.range(0)), 64, 1);
  for (auto _ : state) benchmark::DoNotOptimize(HnswIndex::build(s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HnswBuild)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_HnswQuery(benchmark::State& state) {
  const auto s = random_set(static_cast<std::size_t>(state.range(0)), 64, 2);
  const auto idx = HnswIndex::build(s);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(idx.query_knn(s.row(i), 10));
    i = (i + 1) % s.size();
  }
}
BENCHMARK(BM_HnswQuery)->Arg(1000)->Arg(5000);

void BM_BruteForceQuery(benchmark::State& state) {
  const auto s = random_set(static_cast<std::size_t>(state.range(0)), 64, 2);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute_force_knn(s, s.row(i), 10));
    i = (i + 1) % s.size();
  }
}
BENCHMARK(BM_BruteForceQuery)->Arg(1000)->Arg(5000);

void BM_Evaluate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::map<ClaimId, std::string> p, t;
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = "c" + std::to_string(i);
    p.emplace(id, std::to_string(rng() % (n / 5 + 1)));
    t.emplace(id, std::to_string(rng() % (n / 5 + 1)));
  }
  const Partition pred(p), truth(t);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(pred, truth));
}
BENCHMARK(BM_Evaluate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Agglomerative(benchmark::State& state) {
  const auto s = random_set(static_cast<std::size_t>(state.range(0)), 32, 4);
  for (auto _ : state) benchmark::DoNotOptimize(agglomerative_cluster(s));
}
BENCHMARK(BM_Agglomerative)->Arg(500)->Arg(1500)->Unit(benchmark::kMillisecond);

void BM_UnionFind(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::vector<std::pair<std::size_t, std::size_t>> edges(n);
  for (auto& e : edges) e = {rng() % n, rng() % n};
  for (auto _ : state) {
    UnionFind uf(n);
    for (auto [a, b] : edges) uf.unite(a, b);
    benchmark::DoNotOptimize(uf.component_count());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_UnionFind)->Arg(100000);

}  // namespace
BENCHMARK_MAIN();
