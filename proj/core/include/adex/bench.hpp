#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "adex/engine.hpp"
#include "adex/workload.hpp"

namespace adex::bench {

struct BenchOptions {
  std::vector<auction::Method> methods;
  auction::Pricing pricing = auction::Pricing::GSP;
  unsigned topk_threads = 1;
  std::optional<std::size_t> max_auctions;
};

struct BenchRecord {
  std::size_t auction = 0;
  auction::Method method = auction::Method::H;
  std::int64_t determination_us = 0;  // winner-determination (matching) time
  double expected_total = 0.0;
  int advertisers = 0;
  int slots = 0;
  std::uint64_t seed = 0;
  std::int64_t pipeline_us = 0;  // whole-round time
  unsigned threads = 1;
};

// Runs the full pipeline per auction per method on identical seeded streams.
// Timing is observation only; outcomes do not depend on the methods run.
std::vector<BenchRecord> run_bench(const Workload& w, const BenchOptions& opts);

// Header: auction,method,micros,total,n,k,seed,pipeline_micros,threads
// where micros is the winner-determination time.
void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records);

struct MethodSummary {
  auction::Method method = auction::Method::H;
  std::size_t auctions = 0;
  double avg_determination_us = 0.0;
  double avg_pipeline_us = 0.0;
};

std::vector<MethodSummary> summarize(const std::vector<BenchRecord>& records);

}  // namespace adex::bench
