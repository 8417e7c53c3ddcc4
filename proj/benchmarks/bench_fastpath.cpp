#include <benchmark/benchmark.h>

#include "adex/engine.hpp"
#include "adex/fastpath.hpp"
#include "adex/workload.hpp"

namespace {

adex::bench::Workload workload(int n) {
  adex::bench::WorkloadSpec spec;
  spec.advertisers = n;
  spec.slots = 15;
  spec.auctions = 64;
  spec.seed = 7;
  return adex::bench::gen_workload(spec);
}

void BM_AuctionRound(benchmark::State& state, adex::auction::Method method) {
  const auto w = workload(static_cast<int>(state.range(0)));
  adex::auction::AuctionConfig cfg;
  cfg.method = method;
  auto engine = std::make_unique<adex::auction::AuctionEngine>(w, cfg);
  std::size_t round = 0;
  for (auto _ : state) {
    if (round == w.queries.size()) {
      // restart on a fresh engine once the query stream is exhausted
      state.PauseTiming();
      engine = std::make_unique<adex::auction::AuctionEngine>(w, cfg);
      round = 0;
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(engine->run_round(round++));
  }
}

void BM_RoundEagerRH(benchmark::State& state) {
  BM_AuctionRound(state, adex::auction::Method::RH);
}
void BM_RoundFastPath(benchmark::State& state) {
  BM_AuctionRound(state, adex::auction::Method::RHTALU);
}
BENCHMARK(BM_RoundEagerRH)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RoundFastPath)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_ThresholdScan(benchmark::State& state) {
  const auto w = workload(static_cast<int>(state.range(0)));
  adex::auction::AuctionConfig cfg;
  cfg.method = adex::auction::Method::RHTALU;
  std::vector<adex::strategy::ProgramState> states;
  for (const auto& adv : w.advertisers) states.push_back(adv.program);
  adex::fastpath::FastPathRuntime runtime(states, w.click_model, w.keywords);
  adex::strategy::Query q;
  q.time = 1.0;
  q.relevance[w.queries.front().keyword] = 1.0;
  runtime.begin_auction(q);
  for (auto _ : state) benchmark::DoNotOptimize(runtime.reduced_pool(15));
}
BENCHMARK(BM_ThresholdScan)->Arg(10000)->Arg(100000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
