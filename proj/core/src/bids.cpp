#include "adex/bids.hpp"

#include <map>

namespace adex::model {

BidsTable::BidsTable(std::vector<BidRow> rows) {
  // merge duplicate formulas by summing, keeping first-occurrence order
  std::map<std::string, std::size_t> seen;
  for (auto& row : rows) {
    std::string key = row.formula.to_string();
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(std::move(key), rows_.size());
      rows_.push_back(std::move(row));
    } else {
      rows_[it->second].value += row.value;
    }
  }
}

Money charge(const BidsTable& table, const AdvertiserOutcome& outcome) {
  Money total = 0;
  for (const BidRow& row : table.rows())
    if (eval_formula(row.formula, outcome)) total += row.value;
  return total;
}

BidValidation validate_bid(const BidsTable& table, int slot_count) {
  BidValidation v;
  for (std::size_t i = 0; i < table.rows().size(); ++i) {
    const BidRow& row = table.rows()[i];
    if (row.value < 0) v.issues.push_back({i, "negative value"});
    const int max_slot = row.formula.max_slot_index();
    if (max_slot > slot_count)
      v.issues.push_back({i, "slot index " + std::to_string(max_slot) + " out of range 1.." +
                                 std::to_string(slot_count)});
  }
  v.ok = v.issues.empty();
  return v;
}

BidValidation validate_bids_json(const nlohmann::json& rows, int slot_count) {
  BidValidation v;
  if (!rows.is_array()) {
    v.issues.push_back({0, "expected a JSON array of bid rows"});
    v.ok = false;
    return v;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (!row.is_object() || !row.contains("formula") || !row.contains("value")) {
      v.issues.push_back({i, "row must be an object with 'formula' and 'value'"});
      continue;
    }
    if (!row["formula"].is_string()) {
      v.issues.push_back({i, "'formula' must be a string"});
    } else {
      try {
        parse_formula(row["formula"].get<std::string>(), slot_count);
      } catch (const ParseError& e) {
        v.issues.push_back({i, e.what()});
      }
    }
    if (!row["value"].is_number_integer()) {
      v.issues.push_back({i, "'value' must be an integer (cents)"});
    } else if (row["value"].get<Money>() < 0) {
      v.issues.push_back({i, "negative value"});
    }
  }
  v.ok = v.issues.empty();
  return v;
}

nlohmann::json bids_to_json(const BidsTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const BidRow& row : table.rows())
    rows.push_back({{"formula", row.formula.to_string()}, {"value", row.value}});
  return rows;
}

BidsTable bids_from_json(const nlohmann::json& rows, int slot_count) {
  std::vector<BidRow> out;
  if (!rows.is_array()) throw std::invalid_argument("bids JSON must be an array");
  for (const auto& row : rows) {
    BidRow r;
    r.formula = parse_formula(row.at("formula").get<std::string>(), slot_count);
    r.value = row.at("value").get<Money>();
    out.push_back(std::move(r));
  }
  return BidsTable(std::move(out));
}

}  // namespace adex::model
