#include "adex/strategy.hpp"

#include <algorithm>
#include <stdexcept>

namespace adex::strategy {

std::string Query::primary_keyword() const {
  std::string best;
  double best_rel = -1.0;
  for (const auto& [kw, rel] : relevance) {
    if (rel > best_rel) {
      best = kw;
      best_rel = rel;
    }
  }
  return best;
}

BidsTable roi_on_query(ProgramState& s, const Query& q) {
  if (!(q.time > 0.0)) throw std::invalid_argument("query time must be positive");

  // refresh relevance scores from the query
  for (KeywordRow& row : s.keywords) {
    auto it = q.relevance.find(row.text);
    row.relevance = it == q.relevance.end() ? 0.0 : it->second;
  }

  if (!s.keywords.empty()) {
    double max_roi = s.keywords.front().roi;
    double min_roi = s.keywords.front().roi;
    for (const KeywordRow& row : s.keywords) {
      max_roi = std::max(max_roi, row.roi);
      min_roi = std::min(min_roi, row.roi);
    }

    const double spend_rate = static_cast<double>(s.amt_spent) / q.time;
    if (spend_rate < s.target_spend_rate) {
      // underspending: raise relevant bids with the best return, up to maxbid
      for (KeywordRow& row : s.keywords)
        if (row.roi == max_roi && row.relevance > 0.0 && row.bid < row.maxbid) row.bid += 1;
    } else if (spend_rate > s.target_spend_rate) {
      // overspending: lower relevant bids with the worst return, down to zero
      for (KeywordRow& row : s.keywords)
        if (row.roi == min_roi && row.relevance > 0.0 && row.bid > 0) row.bid -= 1;
    }
  }

  // one output row per distinct formula; only rows with relevance above 0.7
  // contribute to the sum, so untouched formulas publish value 0
  std::vector<model::BidRow> out;
  std::vector<std::string> seen;
  for (const KeywordRow& row : s.keywords) {
    const std::string key = row.formula.to_string();
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    Money value = 0;
    for (const KeywordRow& r2 : s.keywords)
      if (r2.relevance > 0.7 && r2.formula == row.formula) value += r2.bid;
    out.push_back({row.formula, value});
  }
  return BidsTable(std::move(out));
}

Money value_per_click(const ProgramState& s, const std::string& keyword) {
  Money best = 0;
  for (const KeywordRow& row : s.keywords)
    if (row.text == keyword) best = std::max(best, row.maxbid);
  return best;
}

void roi_on_settlement(ProgramState& s, const SettlementRecord& rec, const std::string& keyword) {
  s.amt_spent += rec.charge;
  Money& spent = s.spent_per_keyword[keyword];
  spent += rec.charge;
  double& gained = s.value_gained[keyword];
  if (rec.clicked) gained += static_cast<double>(value_per_click(s, keyword));

  const double roi = spent > 0 ? gained / static_cast<double>(spent) : 0.0;
  for (KeywordRow& row : s.keywords)
    if (row.text == keyword) row.roi = roi;
}

nlohmann::json program_state_to_json(const ProgramState& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (const KeywordRow& row : s.keywords)
    rows.push_back({{"text", row.text},
                    {"formula", row.formula.to_string()},
                    {"maxbid", row.maxbid},
                    {"roi", row.roi},
                    {"bid", row.bid},
                    {"relevance", row.relevance}});
  nlohmann::json gained = nlohmann::json::object();
  for (const auto& [kw, v] : s.value_gained) gained[kw] = v;
  nlohmann::json spent = nlohmann::json::object();
  for (const auto& [kw, v] : s.spent_per_keyword) spent[kw] = v;
  return {{"keywords", rows},
          {"amtSpent", s.amt_spent},
          {"targetSpendRate", s.target_spend_rate},
          {"valueGained", gained},
          {"spentPerKeyword", spent}};
}

ProgramState program_state_from_json(const nlohmann::json& j, int slot_count) {
  ProgramState s;
  for (const auto& row : j.at("keywords")) {
    KeywordRow r;
    r.text = row.at("text").get<std::string>();
    r.formula = model::parse_formula(row.at("formula").get<std::string>(), slot_count);
    r.maxbid = row.at("maxbid").get<Money>();
    r.roi = row.at("roi").get<double>();
    r.bid = row.at("bid").get<Money>();
    r.relevance = row.value("relevance", 0.0);
    if (r.bid < 0 || r.bid > r.maxbid) throw std::invalid_argument("bid outside [0, maxbid]");
    if (r.roi < 0.0) throw std::invalid_argument("negative roi");
    s.keywords.push_back(std::move(r));
  }
  s.amt_spent = j.value("amtSpent", Money{0});
  s.target_spend_rate = j.at("targetSpendRate").get<double>();
  if (j.contains("valueGained"))
    for (const auto& [kw, v] : j.at("valueGained").items()) s.value_gained[kw] = v.get<double>();
  if (j.contains("spentPerKeyword"))
    for (const auto& [kw, v] : j.at("spentPerKeyword").items())
      s.spent_per_keyword[kw] = v.get<Money>();
  return s;
}

void ProgramRegistry::register_program(AdvertiserId id, std::unique_ptr<BiddingProgram> program) {
  if (id < 0) throw std::invalid_argument("advertiser id must be non-negative");
  if (static_cast<std::size_t>(id) >= programs_.size())
    programs_.resize(static_cast<std::size_t>(id) + 1);
  programs_[static_cast<std::size_t>(id)] = std::move(program);
}

BiddingProgram* ProgramRegistry::program(AdvertiserId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= programs_.size()) return nullptr;
  return programs_[static_cast<std::size_t>(id)].get();
}

const BiddingProgram* ProgramRegistry::program(AdvertiserId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= programs_.size()) return nullptr;
  return programs_[static_cast<std::size_t>(id)].get();
}

std::vector<BidsTable> ProgramRegistry::trigger(const Query& q) {
  std::vector<BidsTable> bids(programs_.size());
  for (std::size_t i = 0; i < programs_.size(); ++i) {
    if (!programs_[i]) continue;
    try {
      bids[i] = programs_[i]->on_query(q);
    } catch (const std::exception& e) {
      // a faulty program sits out this auction with an empty table
      ++errors_;
      if (on_error_) on_error_(static_cast<AdvertiserId>(i), e.what());
    }
  }
  return bids;
}

void ProgramRegistry::notify(const std::vector<SettlementRecord>& records,
                             const std::string& keyword) {
  for (const SettlementRecord& rec : records) {
    BiddingProgram* p = program(rec.advertiser);
    if (!p) continue;
    try {
      p->on_settlement(rec, keyword);
    } catch (const std::exception& e) {
      ++errors_;
      if (on_error_) on_error_(rec.advertiser, e.what());
    }
  }
}

}  // namespace adex::strategy
