#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "adex/auction.hpp"
#include "adex/bids.hpp"
#include "adex/formula.hpp"

namespace adex::strategy {

using auction::SettlementRecord;
using model::BidsTable;
using model::Formula;

// One row of an advertiser's private Keywords table.
struct KeywordRow {
  std::string text;
  Formula formula;
  Money maxbid = 0;
  double roi = 0.0;
  Money bid = 0;
  double relevance = 0.0;  // score of this keyword in the current query
};

// Private per-advertiser program state: the Keywords table plus the spend and
// return counters the provider maintains between auctions.
struct ProgramState {
  std::vector<KeywordRow> keywords;
  Money amt_spent = 0;
  double target_spend_rate = 0.0;  // cents per time unit
  std::map<std::string, double> value_gained;     // per keyword text
  std::map<std::string, Money> spent_per_keyword;  // per keyword text
};

struct Query {
  double time = 0.0;
  std::map<std::string, double> relevance;  // keyword -> [0, 1]

  // Keyword with the highest relevance (lexicographically first on ties).
  std::string primary_keyword() const;
};

// The ROI-equalization bidding program, run once per query:
//  - refresh row relevances from the query,
//  - if underspending (amtSpent/time < target), raise by one cent the bids of
//    relevant max-ROI rows still below their maxbid,
//  - if overspending, lower by one cent the bids of relevant min-ROI rows
//    still above zero,
//  - output one Bids row per distinct formula, valued by the sum of bids of
//    rows with relevance > 0.7 (0 when no row qualifies).
BidsTable roi_on_query(ProgramState& s, const Query& q);

// Settlement bookkeeping: accumulate spend, credit the keyword's value on a
// click (the row's maxbid serves as the advertiser's value per click), and
// refresh the keyword's ROI = value gained / amount spent (0 until the first
// nonzero spend).
void roi_on_settlement(ProgramState& s, const SettlementRecord& rec, const std::string& keyword);

// Value credited per click for a keyword: the largest maxbid among its rows.
Money value_per_click(const ProgramState& s, const std::string& keyword);

nlohmann::json program_state_to_json(const ProgramState& s);
ProgramState program_state_from_json(const nlohmann::json& j, int slot_count);

// Pluggable per-advertiser bidding program. Programs see only the shared
// read-only query and their own private state, so they never interact.
class BiddingProgram {
 public:
  virtual ~BiddingProgram() = default;
  virtual BidsTable on_query(const Query& q) = 0;
  virtual void on_settlement(const SettlementRecord& rec, const std::string& keyword) = 0;
};

class RoiProgram final : public BiddingProgram {
 public:
  explicit RoiProgram(ProgramState initial) : state_(std::move(initial)) {}

  BidsTable on_query(const Query& q) override { return roi_on_query(state_, q); }
  void on_settlement(const SettlementRecord& rec, const std::string& keyword) override {
    roi_on_settlement(state_, rec, keyword);
  }

  const ProgramState& state() const { return state_; }
  ProgramState& state() { return state_; }

 private:
  ProgramState state_;
};

// Registry driving the program lifecycle: trigger() runs every registered
// program against the query, notify() forwards settlement records to their
// owners. A program that throws is skipped for that auction and reported
// through the error handler (default: counted silently).
class ProgramRegistry {
 public:
  using ErrorHandler = std::function<void(AdvertiserId, const std::string&)>;

  void register_program(AdvertiserId id, std::unique_ptr<BiddingProgram> program);
  std::size_t size() const { return programs_.size(); }

  std::vector<BidsTable> trigger(const Query& q);
  void notify(const std::vector<SettlementRecord>& records, const std::string& keyword);

  void set_error_handler(ErrorHandler h) { on_error_ = std::move(h); }
  std::size_t error_count() const { return errors_; }

  BiddingProgram* program(AdvertiserId id);
  const BiddingProgram* program(AdvertiserId id) const;

 private:
  std::vector<std::unique_ptr<BiddingProgram>> programs_;  // indexed by advertiser id
  std::size_t errors_ = 0;
  ErrorHandler on_error_;
};

}  // namespace adex::strategy
