#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "adex/matching.hpp"
#include "adex/probability.hpp"
#include "adex/strategy.hpp"

namespace adex::fastpath {

using matching::TopKList;

// Descending value lists, one per parameter, over a common advertiser set,
// with by-id random access. Parameter 0 is the click-probability list by
// convention; the remaining parameters are the advertiser-specific inputs of
// the score function.
class SortedIndex {
 public:
  explicit SortedIndex(std::vector<std::vector<double>> values_by_param);

  int params() const { return static_cast<int>(values_.size()); }
  int advertisers() const { return n_; }

  double value(int param, AdvertiserId id) const {
    return values_[static_cast<std::size_t>(param)][static_cast<std::size_t>(id)];
  }
  const std::vector<std::pair<double, AdvertiserId>>& list(int param) const {
    return lists_[static_cast<std::size_t>(param)];
  }

 private:
  int n_ = 0;
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<std::pair<double, AdvertiserId>>> lists_;
};

struct ThresholdStats {
  std::int64_t value_reads = 0;  // distinct (advertiser, parameter) values materialized
  std::int64_t ids_touched = 0;
  std::int64_t full_scan_reads = 0;  // n * params, for comparison
};

// Score function over the advertiser-specific parameters y (params 1..P-1)
// and the shared global parameters z; must be non-negative and monotone
// non-decreasing in every component of y.
using ScoreFn = std::function<double(const std::vector<double>& y, const std::vector<double>& z)>;

// Returns the k advertisers maximizing value(0, i) * f(y_i, z), identical to
// a full scan (ties by ascending id). Round-robin sequential scans with
// random-access completion; stops once the k-th best found score strictly
// exceeds the threshold formed from the current scan frontiers. A null f
// means the product of all y and z values. With check_monotone set, f is
// probed on sampled component-wise meets/joins and rejected if decreasing.
TopKList threshold_topk(const SortedIndex& idx, const ScoreFn& f, const std::vector<double>& z,
                        int k, ThresholdStats* stats = nullptr, bool check_monotone = false);

// A list of programs whose stored bids all shift by one shared adjustment
// variable, so incrementing or decrementing every member is a single write.
// Members are ordered by stored bid (equivalently by effective bid, since the
// shift is uniform), ties by ascending program id.
class AdjustmentList {
 public:
  enum class Direction { Increment, Decrement, Constant };

  explicit AdjustmentList(Direction d) : direction_(d) {}

  Direction direction() const { return direction_; }
  Money adjustment() const { return adjustment_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(AdvertiserId program) const { return stored_.count(program) != 0; }

  void insert(AdvertiserId program, Money effective_bid);
  void erase(AdvertiserId program);
  Money effective(AdvertiserId program) const;

  // O(1) shift of every member's effective bid; rejects steps other than +-1
  // and any adjustment of a constant list.
  void logical_adjust(Money delta);

  // Iteration in descending effective bid, ties by ascending id. The stored
  // key is (stored bid, id); adding the adjustment preserves the order.
  struct DescOrder {
    bool operator()(const std::pair<Money, AdvertiserId>& a,
                    const std::pair<Money, AdvertiserId>& b) const {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    }
  };
  using MemberSet = std::set<std::pair<Money, AdvertiserId>, DescOrder>;
  const MemberSet& members() const { return members_; }

 private:
  Direction direction_;
  Money adjustment_ = 0;
  MemberSet members_;  // (stored bid, program)
  std::unordered_map<AdvertiserId, Money> stored_;
};

enum class TriggerVariable { Time, KeywordAuctions };
enum class TriggerAction { RateFlip, BidFloor, BidCap };

struct CriticalTrigger {
  TriggerVariable variable = TriggerVariable::Time;
  double critical = 0.0;
  TriggerAction action = TriggerAction::RateFlip;
};

// Critical values at which a losing program must migrate between lists for
// the given keyword: the spending-rate crossing t* = amtSpent / targetRate
// (underspending begins once time exceeds it; omitted when the target rate is
// zero), the bid floor after `effective_bid` more decrementing auctions of
// the keyword, and the bid cap after (maxbid - effective_bid) incrementing
// auctions.
std::vector<CriticalTrigger> compute_critical(const strategy::ProgramState& s,
                                              const std::string& keyword, Money effective_bid,
                                              std::int64_t keyword_auction_count);

// Priority queue of triggers on one shared monotone variable, ordered by
// ascending critical value. fire() pops everything due at the new value;
// handlers may enqueue new triggers strictly above it. Non-monotone variable
// updates are rejected.
class TriggerQueue {
 public:
  struct Entry {
    double critical = 0.0;
    std::uint64_t seq = 0;  // insertion order, for deterministic tie handling
    AdvertiserId program = 0;
    int keyword = -1;
    TriggerAction action = TriggerAction::RateFlip;
    std::uint64_t epoch = 0;  // stamped by the owner; stale entries are skipped
  };

  void push(double critical, AdvertiserId program, int keyword, TriggerAction action,
            std::uint64_t epoch);

  // Pops every trigger with critical <= value and invokes the handler.
  // Returns the number fired. Throws std::invalid_argument when value is
  // below the last fired value.
  int fire(double value, const std::function<void(const Entry&)>& handler);

  double current() const { return current_; }
  std::size_t size() const { return heap_.size(); }
  bool empty() const { return heap_.empty(); }

 private:
  struct Order {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.critical != b.critical) return a.critical > b.critical;
      return a.seq > b.seq;
    }
  };
  std::vector<Entry> heap_;
  std::uint64_t next_seq_ = 0;
  double current_ = -std::numeric_limits<double>::infinity();
  bool fired_once_ = false;
};

// Incremental evaluation layer for fleets of ROI programs: instead of running
// every program each auction, per-keyword increment/decrement/constant lists
// carry the bid updates as shared adjustments, triggers migrate programs when
// a bound or the spending-rate crossing is reached, and per-slot threshold
// scans over the static click lists and the live bid lists produce the
// reduced candidate pool. Winners are evaluated eagerly and re-inserted.
//
// Requirements (checked at construction): every keyword row bids on the
// plain click formula, at most one row per (program, keyword), and queries
// carry exactly one keyword with relevance 1.
class FastPathRuntime {
 public:
  FastPathRuntime(std::vector<strategy::ProgramState> states, const prob::ClickModel& model,
                  std::vector<std::string> keywords);

  int advertisers() const { return static_cast<int>(states_.size()); }
  int slots() const;

  // Advances time, fires due triggers, applies the per-keyword logical
  // increment/decrement, and fires bound triggers. Must be called once per
  // auction with non-decreasing query times.
  void begin_auction(const strategy::Query& q);

  int current_keyword() const { return current_kw_; }

  // Union over slots of the per_slot best advertisers by expected residual
  // for the current keyword, found by threshold scans; ascending ids.
  std::vector<AdvertiserId> reduced_pool(int per_slot);

  Money effective_bid(AdvertiserId program) const;  // current keyword
  model::BidsTable bids_for(AdvertiserId program) const;
  double residual(AdvertiserId program, int slot) const;

  // Applies settlement bookkeeping through the same update rule as the eager
  // path and re-inserts the touched programs with fresh triggers.
  void after_settlement(const std::vector<auction::SettlementRecord>& records);

  // Program states with list-resident bids materialized back into the rows.
  std::vector<strategy::ProgramState> materialize_states() const;

  const ThresholdStats& last_scan_stats() const { return scan_stats_; }
  std::size_t pending_triggers() const;

  // Invariant walk: no decrement member sits at effective bid 0 and no
  // increment member at its maxbid. Returns the number of members checked,
  // throwing on a violation.
  std::size_t check_list_soundness() const;

 private:
  enum class ListTag { None, Increment, Decrement, Constant };
  enum class Direction { Under, Over, Balanced };

  struct RowState {
    int row_index = -1;  // index into ProgramState::keywords, -1 = no row
    ListTag tag = ListTag::None;
    std::uint64_t epoch = 0;
  };

  struct KeywordState {
    AdjustmentList inc{AdjustmentList::Direction::Increment};
    AdjustmentList dec{AdjustmentList::Direction::Decrement};
    AdjustmentList cons{AdjustmentList::Direction::Constant};
    std::vector<RowState> rows;  // indexed by program
    std::int64_t auction_count = 0;
    TriggerQueue bound_triggers;
  };

  Direction direction_of(AdvertiserId program, double time) const;
  AdjustmentList& list_of(KeywordState& ks, ListTag tag);
  const AdjustmentList& list_of(const KeywordState& ks, ListTag tag) const;

  void insert_row(AdvertiserId program, int kw, Money effective, double time);
  Money remove_row(AdvertiserId program, int kw);
  void reinsert_program(AdvertiserId program, double time);
  void ensure_rate_trigger(AdvertiserId program, double time);
  void handle_time_trigger(const TriggerQueue::Entry& e);
  void handle_bound_trigger(int kw, const TriggerQueue::Entry& e);

  std::vector<strategy::ProgramState> states_;
  const prob::ClickModel* model_ = nullptr;
  std::vector<std::string> keywords_;
  std::map<std::string, int> keyword_index_;
  std::vector<std::vector<int>> program_rows_;  // per program: keyword indexes with a row

  std::vector<KeywordState> kw_state_;
  std::vector<std::vector<std::pair<double, AdvertiserId>>> w_sorted_;  // per slot, desc
  Matrix click_prob_;  // P(click | i, slot) through the shared probability path

  TriggerQueue time_triggers_;
  std::vector<std::uint64_t> program_epoch_;      // stamps time triggers
  std::vector<bool> rate_trigger_pending_;
  double time_ = 0.0;
  int current_kw_ = -1;

  // per-slot-scan dedup stamps
  std::vector<std::uint32_t> score_stamp_;
  std::uint32_t stamp_ = 0;
  ThresholdStats scan_stats_;
};

}  // namespace adex::fastpath
