#include "adex/fastpath.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace adex::fastpath {

using strategy::KeywordRow;
using strategy::ProgramState;

SortedIndex::SortedIndex(std::vector<std::vector<double>> values_by_param)
    : values_(std::move(values_by_param)) {
  if (values_.empty()) throw std::invalid_argument("at least one parameter list required");
  n_ = static_cast<int>(values_.front().size());
  for (const auto& v : values_)
    if (static_cast<int>(v.size()) != n_)
      throw std::invalid_argument("parameter lists must cover the same advertisers");
  lists_.resize(values_.size());
  for (std::size_t p = 0; p < values_.size(); ++p) {
    auto& list = lists_[p];
    list.reserve(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) list.emplace_back(values_[p][static_cast<std::size_t>(i)], i);
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
  }
}

namespace {

double product_score(const std::vector<double>& y, const std::vector<double>& z) {
  double p = 1.0;
  for (double v : y) p *= v;
  for (double v : z) p *= v;
  return p;
}

void check_monotone_sampled(const SortedIndex& idx, const ScoreFn& f,
                            const std::vector<double>& z) {
  const int P = idx.params();
  const int n = idx.advertisers();
  if (P < 2 || n < 2) return;
  std::mt19937_64 rng(0x5eed);
  std::vector<double> lo(static_cast<std::size_t>(P - 1));
  std::vector<double> hi(static_cast<std::size_t>(P - 1));
  for (int trial = 0; trial < 64; ++trial) {
    const auto a = static_cast<AdvertiserId>(rng() % static_cast<std::uint64_t>(n));
    const auto b = static_cast<AdvertiserId>(rng() % static_cast<std::uint64_t>(n));
    for (int p = 1; p < P; ++p) {
      const double va = idx.value(p, a);
      const double vb = idx.value(p, b);
      lo[static_cast<std::size_t>(p - 1)] = std::min(va, vb);
      hi[static_cast<std::size_t>(p - 1)] = std::max(va, vb);
    }
    if (f(lo, z) > f(hi, z) * (1.0 + 1e-12) + 1e-12)
      throw std::invalid_argument("score function is not monotone");
  }
}

}  // namespace

TopKList threshold_topk(const SortedIndex& idx, const ScoreFn& f, const std::vector<double>& z,
                        int k, ThresholdStats* stats, bool check_monotone) {
  const int P = idx.params();
  const int n = idx.advertisers();
  const ScoreFn& fn = f ? f : ScoreFn(product_score);
  if (check_monotone && f) check_monotone_sampled(idx, f, z);

  TopKList top(k);
  ThresholdStats st;
  st.full_scan_reads = static_cast<std::int64_t>(n) * P;
  if (k <= 0 || n == 0) {
    if (stats) *stats = st;
    return top;
  }

  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<std::size_t> pos(static_cast<std::size_t>(P), 0);
  std::vector<double> frontier(static_cast<std::size_t>(P), 0.0);
  std::vector<double> y(static_cast<std::size_t>(P - 1), 0.0);

  auto touch = [&](AdvertiserId id) {
    if (seen[static_cast<std::size_t>(id)]) return;
    seen[static_cast<std::size_t>(id)] = 1;
    ++st.ids_touched;
    st.value_reads += P;
    for (int p = 1; p < P; ++p) y[static_cast<std::size_t>(p - 1)] = idx.value(p, id);
    top.push(id, idx.value(0, id) * fn(y, z));
  };

  bool exhausted = false;
  while (!exhausted) {
    for (int p = 0; p < P; ++p) {
      auto& cursor = pos[static_cast<std::size_t>(p)];
      const auto& entry = idx.list(p)[cursor];
      frontier[static_cast<std::size_t>(p)] = entry.first;
      touch(entry.second);
      ++cursor;
      if (cursor == static_cast<std::size_t>(n)) exhausted = true;  // every id seen
    }
    if (exhausted) break;
    if (static_cast<int>(top.size()) == k) {
      for (int p = 1; p < P; ++p) y[static_cast<std::size_t>(p - 1)] = frontier[static_cast<std::size_t>(p)];
      const double tau = frontier[0] * fn(y, z);
      const double guard = tau + std::abs(tau) * 1e-12;
      if (top.entries().back().weight > guard) break;  // nothing unseen can enter
    }
  }

  if (stats) *stats = st;
  return top;
}

void AdjustmentList::insert(AdvertiserId program, Money effective_bid) {
  if (stored_.count(program) != 0) throw std::logic_error("program already in list");
  const Money stored = effective_bid - adjustment_;
  members_.insert({stored, program});
  stored_.emplace(program, stored);
}

void AdjustmentList::erase(AdvertiserId program) {
  auto it = stored_.find(program);
  if (it == stored_.end()) throw std::logic_error("program not in list");
  members_.erase({it->second, program});
  stored_.erase(it);
}

Money AdjustmentList::effective(AdvertiserId program) const {
  return stored_.at(program) + adjustment_;
}

void AdjustmentList::logical_adjust(Money delta) {
  if (direction_ == Direction::Constant)
    throw std::logic_error("constant list adjustment never changes");
  if (delta != 1 && delta != -1) throw std::invalid_argument("adjustment step must be +1 or -1");
  if (direction_ == Direction::Increment && delta != 1)
    throw std::invalid_argument("increment list only steps by +1");
  if (direction_ == Direction::Decrement && delta != -1)
    throw std::invalid_argument("decrement list only steps by -1");
  adjustment_ += delta;
}

std::vector<CriticalTrigger> compute_critical(const ProgramState& s, const std::string& keyword,
                                              Money effective_bid,
                                              std::int64_t keyword_auction_count) {
  std::vector<CriticalTrigger> out;
  if (s.target_spend_rate > 0.0) {
    // a losing program's spend stays constant, so its spending rate crosses
    // the target exactly at t* = amtSpent / targetRate
    out.push_back({TriggerVariable::Time,
                   static_cast<double>(s.amt_spent) / s.target_spend_rate,
                   TriggerAction::RateFlip});
  }
  out.push_back({TriggerVariable::KeywordAuctions,
                 static_cast<double>(keyword_auction_count + effective_bid),
                 TriggerAction::BidFloor});
  Money maxbid = 0;
  for (const KeywordRow& row : s.keywords)
    if (row.text == keyword) maxbid = std::max(maxbid, row.maxbid);
  out.push_back({TriggerVariable::KeywordAuctions,
                 static_cast<double>(keyword_auction_count + (maxbid - effective_bid)),
                 TriggerAction::BidCap});
  return out;
}

void TriggerQueue::push(double critical, AdvertiserId program, int keyword, TriggerAction action,
                        std::uint64_t epoch) {
  heap_.push_back({critical, next_seq_++, program, keyword, action, epoch});
  std::push_heap(heap_.begin(), heap_.end(), Order{});
}

int TriggerQueue::fire(double value, const std::function<void(const Entry&)>& handler) {
  if (fired_once_ && value < current_)
    throw std::invalid_argument("trigger variable must be monotone non-decreasing");
  current_ = value;
  fired_once_ = true;
  int fired = 0;
  while (!heap_.empty() && heap_.front().critical <= value) {
    std::pop_heap(heap_.begin(), heap_.end(), Order{});
    const Entry e = heap_.back();
    heap_.pop_back();
    ++fired;
    handler(e);  // may push new triggers strictly above value
  }
  return fired;
}

FastPathRuntime::FastPathRuntime(std::vector<ProgramState> states, const prob::ClickModel& model,
                                 std::vector<std::string> keywords)
    : states_(std::move(states)), model_(&model), keywords_(std::move(keywords)) {
  const int n = static_cast<int>(states_.size());
  if (model_->advertisers() != n)
    throw std::invalid_argument("click model and program count disagree");
  const int k = model_->slots();

  for (int kw = 0; kw < static_cast<int>(keywords_.size()); ++kw)
    keyword_index_.emplace(keywords_[static_cast<std::size_t>(kw)], kw);

  kw_state_.resize(keywords_.size());
  for (auto& ks : kw_state_) ks.rows.resize(static_cast<std::size_t>(n));
  program_rows_.resize(static_cast<std::size_t>(n));
  program_epoch_.assign(static_cast<std::size_t>(n), 1);
  rate_trigger_pending_.assign(static_cast<std::size_t>(n), false);
  score_stamp_.assign(static_cast<std::size_t>(n), 0);

  for (int p = 0; p < n; ++p) {
    const ProgramState& s = states_[static_cast<std::size_t>(p)];
    for (int r = 0; r < static_cast<int>(s.keywords.size()); ++r) {
      const KeywordRow& row = s.keywords[static_cast<std::size_t>(r)];
      if (row.formula.kind() != model::Formula::Kind::Click)
        throw std::invalid_argument("fast path requires plain click bid formulas");
      if (row.bid < 0 || row.bid > row.maxbid)
        throw std::invalid_argument("bid outside [0, maxbid]");
      auto it = keyword_index_.find(row.text);
      if (it == keyword_index_.end())
        throw std::invalid_argument("keyword row references unknown keyword '" + row.text + "'");
      KeywordState& ks = kw_state_[static_cast<std::size_t>(it->second)];
      if (ks.rows[static_cast<std::size_t>(p)].row_index != -1)
        throw std::invalid_argument("fast path requires one row per (program, keyword)");
      ks.rows[static_cast<std::size_t>(p)].row_index = r;
      program_rows_[static_cast<std::size_t>(p)].push_back(it->second);
    }
  }

  w_sorted_.resize(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    auto& list = w_sorted_[static_cast<std::size_t>(j)];
    list.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      list.emplace_back(model_->w(static_cast<std::size_t>(i), static_cast<std::size_t>(j)), i);
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
  }

  // frozen per-(advertiser, slot) click probabilities computed through the
  // same path the eager revenue matrix uses, so scores match it bit for bit
  static const model::Formula click = model::Formula::click();
  click_prob_ = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(k));
  for (int i = 0; i < n; ++i)
    for (int j = 1; j <= k; ++j)
      click_prob_(static_cast<std::size_t>(i), static_cast<std::size_t>(j - 1)) =
          prob::formula_probability(click, i, j, *model_);

  for (int p = 0; p < n; ++p)
    for (int kw : program_rows_[static_cast<std::size_t>(p)]) {
      const RowState& rs = kw_state_[static_cast<std::size_t>(kw)].rows[static_cast<std::size_t>(p)];
      insert_row(p, kw, states_[static_cast<std::size_t>(p)]
                            .keywords[static_cast<std::size_t>(rs.row_index)]
                            .bid,
                 time_);
    }
}

int FastPathRuntime::slots() const { return model_->slots(); }

FastPathRuntime::Direction FastPathRuntime::direction_of(AdvertiserId program, double time) const {
  const ProgramState& s = states_[static_cast<std::size_t>(program)];
  double spend_rate;
  if (time > 0.0) {
    spend_rate = static_cast<double>(s.amt_spent) / time;  // same expression as the eager path
  } else {
    spend_rate = s.amt_spent > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  if (spend_rate < s.target_spend_rate) return Direction::Under;
  if (spend_rate > s.target_spend_rate) return Direction::Over;
  return Direction::Balanced;
}

AdjustmentList& FastPathRuntime::list_of(KeywordState& ks, ListTag tag) {
  switch (tag) {
    case ListTag::Increment: return ks.inc;
    case ListTag::Decrement: return ks.dec;
    case ListTag::Constant: return ks.cons;
    case ListTag::None: break;
  }
  throw std::logic_error("row not on any list");
}

const AdjustmentList& FastPathRuntime::list_of(const KeywordState& ks, ListTag tag) const {
  return const_cast<FastPathRuntime*>(this)->list_of(const_cast<KeywordState&>(ks), tag);
}

void FastPathRuntime::insert_row(AdvertiserId program, int kw, Money effective, double time) {
  KeywordState& ks = kw_state_[static_cast<std::size_t>(kw)];
  RowState& rs = ks.rows[static_cast<std::size_t>(program)];
  if (rs.row_index < 0) throw std::logic_error("program has no row for keyword");
  if (rs.tag != ListTag::None) throw std::logic_error("row already on a list");
  const ProgramState& s = states_[static_cast<std::size_t>(program)];
  const KeywordRow& row = s.keywords[static_cast<std::size_t>(rs.row_index)];

  double max_roi = s.keywords.front().roi;
  double min_roi = s.keywords.front().roi;
  for (const KeywordRow& r2 : s.keywords) {
    max_roi = std::max(max_roi, r2.roi);
    min_roi = std::min(min_roi, r2.roi);
  }

  const Direction dir = direction_of(program, time);
  ListTag tag = ListTag::Constant;
  if (dir == Direction::Under && row.roi == max_roi && effective < row.maxbid)
    tag = ListTag::Increment;
  else if (dir == Direction::Over && row.roi == min_roi && effective > 0)
    tag = ListTag::Decrement;

  list_of(ks, tag).insert(program, effective);
  rs.tag = tag;
  ++rs.epoch;

  if (tag == ListTag::Increment)
    ks.bound_triggers.push(static_cast<double>(ks.auction_count + (row.maxbid - effective)),
                           program, kw, TriggerAction::BidCap, rs.epoch);
  else if (tag == ListTag::Decrement)
    ks.bound_triggers.push(static_cast<double>(ks.auction_count + effective), program, kw,
                           TriggerAction::BidFloor, rs.epoch);

  // a rate crossing matters only if underspending would change this row
  const bool flip_matters =
      dir != Direction::Under &&
      (tag == ListTag::Decrement || (row.roi == max_roi && effective < row.maxbid));
  if (flip_matters) ensure_rate_trigger(program, time);
}

Money FastPathRuntime::remove_row(AdvertiserId program, int kw) {
  KeywordState& ks = kw_state_[static_cast<std::size_t>(kw)];
  RowState& rs = ks.rows[static_cast<std::size_t>(program)];
  if (rs.tag == ListTag::None) throw std::logic_error("row not on a list");
  AdjustmentList& list = list_of(ks, rs.tag);
  const Money eff = list.effective(program);
  list.erase(program);
  rs.tag = ListTag::None;
  ++rs.epoch;
  states_[static_cast<std::size_t>(program)]
      .keywords[static_cast<std::size_t>(rs.row_index)]
      .bid = eff;
  return eff;
}

void FastPathRuntime::ensure_rate_trigger(AdvertiserId program, double time) {
  if (rate_trigger_pending_[static_cast<std::size_t>(program)]) return;
  const ProgramState& s = states_[static_cast<std::size_t>(program)];
  if (!(s.target_spend_rate > 0.0)) return;  // a zero target never flips to underspending
  const double tstar = static_cast<double>(s.amt_spent) / s.target_spend_rate;
  const double critical =
      std::max(tstar, std::nextafter(time, std::numeric_limits<double>::infinity()));
  time_triggers_.push(critical, program, -1, TriggerAction::RateFlip,
                      program_epoch_[static_cast<std::size_t>(program)]);
  rate_trigger_pending_[static_cast<std::size_t>(program)] = true;
}

void FastPathRuntime::reinsert_program(AdvertiserId program, double time) {
  std::vector<std::pair<int, Money>> rows;
  for (int kw : program_rows_[static_cast<std::size_t>(program)]) {
    const RowState& rs = kw_state_[static_cast<std::size_t>(kw)].rows[static_cast<std::size_t>(program)];
    if (rs.tag != ListTag::None) rows.emplace_back(kw, remove_row(program, kw));
  }
  ++program_epoch_[static_cast<std::size_t>(program)];
  rate_trigger_pending_[static_cast<std::size_t>(program)] = false;
  for (const auto& [kw, eff] : rows) insert_row(program, kw, eff, time);
}

void FastPathRuntime::handle_time_trigger(const TriggerQueue::Entry& e) {
  if (e.epoch != program_epoch_[static_cast<std::size_t>(e.program)]) return;  // stale
  rate_trigger_pending_[static_cast<std::size_t>(e.program)] = false;
  // re-evaluate at the current time: list memberships follow the exact
  // spending-rate comparison, and a premature boundary fire re-arms itself
  // through the insert path
  reinsert_program(e.program, time_);
}

void FastPathRuntime::handle_bound_trigger(int kw, const TriggerQueue::Entry& e) {
  const RowState& rs = kw_state_[static_cast<std::size_t>(kw)].rows[static_cast<std::size_t>(e.program)];
  if (e.epoch != rs.epoch || rs.tag == ListTag::None) return;  // stale
  const Money eff = remove_row(e.program, kw);
  insert_row(e.program, kw, eff, time_);
}

void FastPathRuntime::begin_auction(const strategy::Query& q) {
  if (q.relevance.size() != 1 || q.relevance.begin()->second != 1.0)
    throw std::invalid_argument("fast path expects single-keyword queries with relevance 1");
  auto it = keyword_index_.find(q.relevance.begin()->first);
  if (it == keyword_index_.end()) throw std::invalid_argument("query for unknown keyword");
  if (q.time < time_) throw std::invalid_argument("query times must be non-decreasing");

  time_ = q.time;
  time_triggers_.fire(time_, [this](const TriggerQueue::Entry& e) { handle_time_trigger(e); });

  current_kw_ = it->second;
  KeywordState& ks = kw_state_[static_cast<std::size_t>(current_kw_)];
  if (!ks.inc.empty()) ks.inc.logical_adjust(+1);
  if (!ks.dec.empty()) ks.dec.logical_adjust(-1);
  ks.auction_count += 1;
  ks.bound_triggers.fire(static_cast<double>(ks.auction_count),
                         [this](const TriggerQueue::Entry& e) {
                           handle_bound_trigger(current_kw_, e);
                         });
}

Money FastPathRuntime::effective_bid(AdvertiserId program) const {
  if (current_kw_ < 0) throw std::logic_error("no auction in progress");
  const KeywordState& ks = kw_state_[static_cast<std::size_t>(current_kw_)];
  const RowState& rs = ks.rows[static_cast<std::size_t>(program)];
  if (rs.row_index < 0 || rs.tag == ListTag::None) return 0;
  return list_of(ks, rs.tag).effective(program);
}

model::BidsTable FastPathRuntime::bids_for(AdvertiserId program) const {
  return model::BidsTable({{model::Formula::click(), effective_bid(program)}});
}

double FastPathRuntime::residual(AdvertiserId program, int slot) const {
  // value * P(click | slot), the same arithmetic the eager engine's revenue
  // matrix performs for a one-row click table, so both paths agree bitwise
  return static_cast<double>(effective_bid(program)) *
         click_prob_(static_cast<std::size_t>(program), static_cast<std::size_t>(slot - 1));
}

std::vector<AdvertiserId> FastPathRuntime::reduced_pool(int per_slot) {
  if (current_kw_ < 0) throw std::logic_error("no auction in progress");
  const KeywordState& ks = kw_state_[static_cast<std::size_t>(current_kw_)];
  const int n = advertisers();
  const int k = slots();

  scan_stats_ = {};
  scan_stats_.full_scan_reads = static_cast<std::int64_t>(n) * 2 * k;

  std::set<AdvertiserId> pool;

  struct BidCursor {
    struct Src {
      AdjustmentList::MemberSet::const_iterator it, end;
      Money adj;
    };
    std::array<Src, 3> src;

    std::optional<std::pair<Money, AdvertiserId>> next() {
      int best = -1;
      Money best_eff = 0;
      AdvertiserId best_id = 0;
      for (int s = 0; s < 3; ++s) {
        if (src[static_cast<std::size_t>(s)].it == src[static_cast<std::size_t>(s)].end) continue;
        const Money eff = src[static_cast<std::size_t>(s)].it->first +
                          src[static_cast<std::size_t>(s)].adj;
        const AdvertiserId id = src[static_cast<std::size_t>(s)].it->second;
        if (best < 0 || eff > best_eff || (eff == best_eff && id < best_id)) {
          best = s;
          best_eff = eff;
          best_id = id;
        }
      }
      if (best < 0) return std::nullopt;
      ++src[static_cast<std::size_t>(best)].it;
      return std::make_pair(best_eff, best_id);
    }
  };

  for (int j = 1; j <= k; ++j) {
    ++stamp_;
    TopKList top(per_slot);
    const auto& wlist = w_sorted_[static_cast<std::size_t>(j - 1)];

    BidCursor bids;
    bids.src[0] = {ks.inc.members().begin(), ks.inc.members().end(), ks.inc.adjustment()};
    bids.src[1] = {ks.dec.members().begin(), ks.dec.members().end(), ks.dec.adjustment()};
    bids.src[2] = {ks.cons.members().begin(), ks.cons.members().end(), 0};

    auto touch = [&](AdvertiserId id) {
      if (score_stamp_[static_cast<std::size_t>(id)] == stamp_) return;
      score_stamp_[static_cast<std::size_t>(id)] = stamp_;
      ++scan_stats_.ids_touched;
      scan_stats_.value_reads += 2;
      top.push(id, residual(id, j));
    };

    std::size_t wpos = 0;
    double w_frontier = 1.0;
    double bid_frontier = std::numeric_limits<double>::max();
    while (true) {
      w_frontier = wlist[wpos].first;
      touch(wlist[wpos].second);
      ++wpos;
      if (wpos == static_cast<std::size_t>(n)) break;  // every advertiser seen

      if (auto head = bids.next()) {
        bid_frontier = static_cast<double>(head->first);
        touch(head->second);
      } else {
        bid_frontier = 0.0;  // advertisers without a row bid zero
      }

      if (static_cast<int>(top.size()) == std::min(per_slot, n)) {
        const double tau = w_frontier * bid_frontier;
        const double guard = tau + tau * 1e-12;
        if (top.entries().back().weight > guard) break;
      }
    }

    for (const auto& e : top.entries()) pool.insert(e.advertiser);
  }

  return {pool.begin(), pool.end()};
}

void FastPathRuntime::after_settlement(const std::vector<auction::SettlementRecord>& records) {
  if (current_kw_ < 0) throw std::logic_error("no auction in progress");
  const std::string& kw_name = keywords_[static_cast<std::size_t>(current_kw_)];
  for (const auto& rec : records) {
    const AdvertiserId p = rec.advertiser;
    // settlement bookkeeping can move ROI ranks even with a zero charge, so
    // the program is always re-evaluated eagerly and re-inserted
    std::vector<std::pair<int, Money>> rows;
    for (int kw : program_rows_[static_cast<std::size_t>(p)]) {
      const RowState& rs =
          kw_state_[static_cast<std::size_t>(kw)].rows[static_cast<std::size_t>(p)];
      if (rs.tag != ListTag::None) rows.emplace_back(kw, remove_row(p, kw));
    }
    strategy::roi_on_settlement(states_[static_cast<std::size_t>(p)], rec, kw_name);
    ++program_epoch_[static_cast<std::size_t>(p)];
    rate_trigger_pending_[static_cast<std::size_t>(p)] = false;
    for (const auto& [kw, eff] : rows) insert_row(p, kw, eff, time_);
  }
}

std::vector<ProgramState> FastPathRuntime::materialize_states() const {
  std::vector<ProgramState> out = states_;
  for (int kw = 0; kw < static_cast<int>(kw_state_.size()); ++kw) {
    const KeywordState& ks = kw_state_[static_cast<std::size_t>(kw)];
    for (int p = 0; p < advertisers(); ++p) {
      const RowState& rs = ks.rows[static_cast<std::size_t>(p)];
      if (rs.row_index < 0 || rs.tag == ListTag::None) continue;
      out[static_cast<std::size_t>(p)]
          .keywords[static_cast<std::size_t>(rs.row_index)]
          .bid = list_of(ks, rs.tag).effective(p);
    }
  }
  return out;
}

std::size_t FastPathRuntime::pending_triggers() const {
  std::size_t total = time_triggers_.size();
  for (const auto& ks : kw_state_) total += ks.bound_triggers.size();
  return total;
}

std::size_t FastPathRuntime::check_list_soundness() const {
  std::size_t checked = 0;
  for (const auto& ks : kw_state_) {
    for (const auto& [stored, program] : ks.dec.members()) {
      if (stored + ks.dec.adjustment() <= 0)
        throw std::logic_error("decrement member at or below the bid floor");
      ++checked;
    }
    for (const auto& [stored, program] : ks.inc.members()) {
      const RowState& rs = ks.rows[static_cast<std::size_t>(program)];
      const Money maxbid = states_[static_cast<std::size_t>(program)]
                               .keywords[static_cast<std::size_t>(rs.row_index)]
                               .maxbid;
      if (stored + ks.inc.adjustment() >= maxbid)
        throw std::logic_error("increment member at or above its maxbid");
      ++checked;
    }
  }
  return checked;
}

}  // namespace adex::fastpath
