#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "adex/auction.hpp"
#include "adex/fastpath.hpp"
#include "adex/strategy.hpp"
#include "adex/workload.hpp"

namespace adex::auction {

struct RoundTiming {
  std::int64_t determination_us = 0;  // matching stage only
  std::int64_t pipeline_us = 0;       // program evaluation through settlement
};

struct RoundResult {
  Allocation allocation;
  double expected_total = 0.0;
  std::vector<SettlementRecord> settlements;
  RoundTiming timing;
};

// One full auction pipeline over a workload: program evaluation, winner
// determination, pricing, seeded user simulation, settlement, and program
// notification. BF/H/RH run every program eagerly each auction; RHTALU
// drives the incremental fast path instead and must produce identical rounds.
class AuctionEngine {
 public:
  AuctionEngine(const bench::Workload& workload, const AuctionConfig& cfg);
  ~AuctionEngine();

  std::size_t auctions() const { return workload_->queries.size(); }
  int advertisers() const { return static_cast<int>(workload_->advertisers.size()); }

  // Rounds must run in order starting from 0.
  RoundResult run_round(std::size_t auction_index);

  std::vector<strategy::ProgramState> program_states() const;

  // RHTALU engines expose their runtime for invariant checks; null otherwise.
  const fastpath::FastPathRuntime* fastpath() const { return fast_.get(); }

  static std::uint64_t round_seed(std::uint64_t workload_seed, std::size_t auction_index);

 private:
  RoundResult run_eager(std::size_t auction_index, const strategy::Query& q);
  RoundResult run_fastpath(std::size_t auction_index, const strategy::Query& q);

  const bench::Workload* workload_;
  AuctionConfig cfg_;
  strategy::ProgramRegistry registry_;
  std::unique_ptr<fastpath::FastPathRuntime> fast_;
  std::size_t next_round_ = 0;
};

}  // namespace adex::auction
