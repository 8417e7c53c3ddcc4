#include <benchmark/benchmark.h>

#include <random>

#include "adex/matching.hpp"

using adex::Matrix;
using adex::matching::WeightedBipartite;

namespace {

WeightedBipartite instance(int n, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 45.0);
  Matrix m(static_cast<std::size_t>(n), static_cast<std::size_t>(k));
  for (auto& v : m.data()) v = unit(rng);
  return {std::move(m)};
}

void BM_TopKCandidates(benchmark::State& state) {
  const auto g = instance(static_cast<int>(state.range(0)), 15, 7);
  for (auto _ : state) benchmark::DoNotOptimize(adex::matching::top_k_candidates(g));
}
BENCHMARK(BM_TopKCandidates)->Arg(10000)->Arg(100000);

void BM_HungarianFull(benchmark::State& state) {
  const auto g = instance(static_cast<int>(state.range(0)), 15, 7);
  for (auto _ : state) benchmark::DoNotOptimize(adex::matching::hungarian(g));
}
BENCHMARK(BM_HungarianFull)->Arg(1000)->Arg(10000);

void BM_SolveReduced(benchmark::State& state) {
  const auto g = instance(static_cast<int>(state.range(0)), 15, 7);
  for (auto _ : state) benchmark::DoNotOptimize(adex::matching::solve_reduced(g));
}
BENCHMARK(BM_SolveReduced)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_KernelReduced(benchmark::State& state) {
  const auto g = instance(10000, 15, 7);
  const auto pool = adex::matching::top_k_candidates(g);
  for (auto _ : state)
    benchmark::DoNotOptimize(adex::matching::detail::assign_max(g.weights, pool, true));
}
BENCHMARK(BM_KernelReduced);

void BM_CanonicalExtract(benchmark::State& state) {
  const auto g = instance(10000, 15, 7);
  const auto pool = adex::matching::top_k_candidates(g);
  const auto kernel = adex::matching::detail::assign_max(g.weights, pool, true);
  for (auto _ : state)
    benchmark::DoNotOptimize(adex::matching::detail::canonical_extract(g.weights, pool,
                                                                       kernel.value, true, 1e-9,
                                                                       &kernel));
}
BENCHMARK(BM_CanonicalExtract);

void BM_MergeTopK(benchmark::State& state) {
  std::mt19937_64 rng(11);
  adex::matching::TopKList a(15), b(15);
  for (int i = 0; i < 15; ++i) {
    a.push(static_cast<adex::AdvertiserId>(rng() % 1000), static_cast<double>(rng() % 100));
    b.push(static_cast<adex::AdvertiserId>(rng() % 1000), static_cast<double>(rng() % 100));
  }
  for (auto _ : state) benchmark::DoNotOptimize(adex::matching::merge_topk(a, b, 15));
}
BENCHMARK(BM_MergeTopK);

}  // namespace

BENCHMARK_MAIN();
