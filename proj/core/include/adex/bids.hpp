#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "adex/formula.hpp"
#include "adex/model.hpp"

namespace adex::model {

struct BidRow {
  Formula formula;
  Money value = 0;  // cents

  bool operator==(const BidRow&) const = default;
};

// An advertiser's OR-bid: a list of (formula, value) rows. Every row whose
// formula holds in the realized outcome is owed, and the charge is the sum of
// those rows' values. Duplicate formulas are merged at construction by
// summing their values, preserving first-occurrence order.
class BidsTable {
 public:
  BidsTable() = default;
  explicit BidsTable(std::vector<BidRow> rows);

  const std::vector<BidRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  std::size_t size() const { return rows_.size(); }

  bool operator==(const BidsTable&) const = default;

 private:
  std::vector<BidRow> rows_;
};

// Sum of row values whose formulas evaluate true under the outcome.
Money charge(const BidsTable& table, const AdvertiserOutcome& outcome);

struct RowIssue {
  std::size_t row = 0;
  std::string reason;
};

struct BidValidation {
  bool ok = true;
  std::vector<RowIssue> issues;
};

// Accepts iff every formula is well-formed for the given slot count and all
// values are non-negative; rejections list the offending rows.
BidValidation validate_bid(const BidsTable& table, int slot_count);

// Validates a JSON array of {"formula": string, "value": int} rows, parsing
// each formula under the grammar. Row indices in issues refer to the array.
BidValidation validate_bids_json(const nlohmann::json& rows, int slot_count);

nlohmann::json bids_to_json(const BidsTable& table);
BidsTable bids_from_json(const nlohmann::json& rows, int slot_count);

}  // namespace adex::model
