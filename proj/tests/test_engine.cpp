#include <doctest.h>

#include <sstream>

#include "adex/bench.hpp"
#include "adex/engine.hpp"

using adex::auction::AuctionConfig;
using adex::auction::AuctionEngine;
using adex::auction::Method;
using adex::auction::Pricing;
using adex::auction::RoundResult;
using adex::bench::BenchOptions;
using adex::bench::gen_workload;
using adex::bench::run_bench;
using adex::bench::Workload;
using adex::bench::WorkloadSpec;
using adex::strategy::ProgramState;

namespace {

Workload small_workload(int n, int k, int auctions, std::uint64_t seed) {
  WorkloadSpec spec;
  spec.advertisers = n;
  spec.slots = k;
  spec.num_keywords = 4;
  spec.auctions = auctions;
  spec.seed = seed;
  return gen_workload(spec);
}

AuctionConfig config(Method m, Pricing p = Pricing::GSP) {
  AuctionConfig cfg;
  cfg.method = m;
  cfg.pricing = p;
  return cfg;
}

bool states_equal(const std::vector<ProgramState>& a, const std::vector<ProgramState>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].amt_spent != b[i].amt_spent) return false;
    if (a[i].value_gained != b[i].value_gained) return false;
    if (a[i].spent_per_keyword != b[i].spent_per_keyword) return false;
    if (a[i].keywords.size() != b[i].keywords.size()) return false;
    for (std::size_t r = 0; r < a[i].keywords.size(); ++r) {
      const auto& x = a[i].keywords[r];
      const auto& y = b[i].keywords[r];
      // relevance is per-query scratch, everything else must agree exactly
      if (x.text != y.text || !(x.formula == y.formula) || x.maxbid != y.maxbid ||
          x.bid != y.bid || x.roi != y.roi)
        return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("identical seeds give identical runs") {
  const Workload w = small_workload(12, 3, 25, 5);
  for (Method m : {Method::RH, Method::RHTALU}) {
    AuctionEngine a(w, config(m));
    AuctionEngine b(w, config(m));
    for (std::size_t i = 0; i < w.queries.size(); ++i) {
      const RoundResult ra = a.run_round(i);
      const RoundResult rb = b.run_round(i);
      CHECK(ra.allocation == rb.allocation);
      CHECK(ra.expected_total == rb.expected_total);
      CHECK(ra.settlements == rb.settlements);
    }
  }
}

TEST_CASE("eager methods agree per auction") {
  const Workload w = small_workload(6, 2, 10, 9);
  AuctionEngine bf(w, config(Method::BF));
  AuctionEngine h(w, config(Method::H));
  AuctionEngine rh(w, config(Method::RH));
  for (std::size_t i = 0; i < w.queries.size(); ++i) {
    const auto a = bf.run_round(i);
    const auto b = h.run_round(i);
    const auto c = rh.run_round(i);
    CHECK(a.allocation == b.allocation);
    CHECK(a.allocation == c.allocation);
    CHECK(a.expected_total == doctest::Approx(b.expected_total).epsilon(1e-9));
    CHECK(a.expected_total == doctest::Approx(c.expected_total).epsilon(1e-9));
    CHECK(a.settlements == b.settlements);
    CHECK(a.settlements == c.settlements);
  }
}

TEST_CASE("the incremental fast path shadows the eager pipeline exactly") {
  for (std::uint64_t seed : {3ull, 17ull, 2026ull}) {
    const Workload w = small_workload(40, 4, 300, seed);
    AuctionEngine eager(w, config(Method::RH));
    AuctionEngine fast(w, config(Method::RHTALU));
    for (std::size_t i = 0; i < w.queries.size(); ++i) {
      const RoundResult a = eager.run_round(i);
      const RoundResult b = fast.run_round(i);
      REQUIRE(a.allocation == b.allocation);
      CHECK(a.expected_total == b.expected_total);  // bit-identical
      REQUIRE(a.settlements == b.settlements);
    }
    CHECK(states_equal(eager.program_states(), fast.program_states()));
  }
}

TEST_CASE("the fast path shadows the eager pipeline under VCG pricing") {
  const Workload w = small_workload(25, 3, 150, 77);
  AuctionEngine eager(w, config(Method::RH, Pricing::VCG));
  AuctionEngine fast(w, config(Method::RHTALU, Pricing::VCG));
  for (std::size_t i = 0; i < w.queries.size(); ++i) {
    const RoundResult a = eager.run_round(i);
    const RoundResult b = fast.run_round(i);
    REQUIRE(a.allocation == b.allocation);
    REQUIRE(a.settlements == b.settlements);
  }
  CHECK(states_equal(eager.program_states(), fast.program_states()));
}

TEST_CASE("bench records identical expected totals across methods") {
  const Workload w = small_workload(6, 2, 10, 21);
  BenchOptions opts;
  opts.methods = {Method::BF, Method::H, Method::RH, Method::RHTALU};
  const auto records = run_bench(w, opts);
  REQUIRE(records.size() == 4 * w.queries.size());
  for (std::size_t a = 0; a < w.queries.size(); ++a) {
    const double expect = records[a].expected_total;  // BF block comes first
    for (std::size_t m = 1; m < 4; ++m)
      CHECK(records[m * w.queries.size() + a].expected_total ==
            doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("bench CSV carries the documented header and rows") {
  const Workload w = small_workload(5, 2, 4, 33);
  BenchOptions opts;
  opts.methods = {Method::H, Method::RH};
  const auto records = run_bench(w, opts);
  std::ostringstream out;
  adex::bench::write_bench_csv(out, records);
  const std::string text = out.str();
  CHECK(text.rfind("auction,method,micros,total,n,k,seed,pipeline_micros,threads\n", 0) == 0);

  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
  }
  CHECK(rows == records.size());
}

TEST_CASE("benchmarking is observation-only: totals equal the plain run") {
  const Workload w = small_workload(8, 2, 12, 55);
  BenchOptions opts;
  opts.methods = {Method::RH};
  const auto records = run_bench(w, opts);
  AuctionEngine engine(w, config(Method::RH));
  for (std::size_t i = 0; i < w.queries.size(); ++i)
    CHECK(engine.run_round(i).expected_total == records[i].expected_total);
}

TEST_CASE("the parallel top-k path changes nothing but the thread count") {
  const Workload w = small_workload(60, 4, 20, 88);
  BenchOptions seq, par;
  seq.methods = {Method::RH};
  par.methods = {Method::RH};
  par.topk_threads = 4;
  const auto a = run_bench(w, seq);
  const auto b = run_bench(w, par);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].expected_total == b[i].expected_total);
    CHECK(b[i].threads == 4);
  }
}

TEST_CASE("rounds must run in order") {
  const Workload w = small_workload(4, 2, 5, 1);
  AuctionEngine engine(w, config(Method::RH));
  CHECK_THROWS_AS(engine.run_round(2), std::logic_error);
  engine.run_round(0);
  CHECK_THROWS_AS(engine.run_round(0), std::logic_error);
}
