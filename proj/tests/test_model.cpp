#include <doctest.h>

#include <random>

#include "adex/bids.hpp"

using adex::Money;
using adex::model::AdvertiserOutcome;
using adex::model::Allocation;
using adex::model::BidRow;
using adex::model::BidsTable;
using adex::model::eval_formula;
using adex::model::Formula;
using adex::model::charge;
using adex::model::validate_bid;
using adex::model::validate_bids_json;

namespace {

// the two-row table: 5 cents on a purchase, 2 cents on the top two positions
BidsTable example_table() {
  return BidsTable({{Formula::conv(), 5}, {Formula::slot(1) | Formula::slot(2), 2}});
}

}  // namespace

TEST_CASE("outcome invariants") {
  CHECK(AdvertiserOutcome::unassigned().valid());
  CHECK(AdvertiserOutcome::seated(1, true, true).valid());
  CHECK_THROWS(AdvertiserOutcome::seated(1, false, true));  // conversion needs a click
  AdvertiserOutcome bad;
  bad.clicked = true;  // click without a slot
  CHECK_FALSE(bad.valid());
}

TEST_CASE("allocation is an injective partial map") {
  Allocation a(3);
  a.assign(1, 7);
  a.assign(3, 2);
  CHECK(a.advertiser_at(1) == 7);
  CHECK(a.advertiser_at(2) == std::nullopt);
  CHECK(a.slot_of(2) == 3);
  CHECK(a.seated_count() == 2);
  CHECK_THROWS(a.assign(2, 7));  // 7 already holds slot 1
  a.assign(1, 7);                // re-assigning the same slot is fine
  CHECK_THROWS(a.assign(4, 1));  // slot out of range
  a.clear_slot(1);
  CHECK(a.advertiser_at(1) == std::nullopt);
}

TEST_CASE("allocation lexicographic order treats empty slots as last") {
  Allocation x(2), y(2);
  x.assign(1, 0);
  y.assign(1, 1);
  CHECK(x.lex_less(y));
  Allocation empty_first(2), seated(2);
  seated.assign(1, 5);
  CHECK(seated.lex_less(empty_first));  // any advertiser beats an empty slot
}

TEST_CASE("charge sums the satisfied rows") {
  const BidsTable t = example_table();
  // purchase in the top slot: both rows true
  CHECK(charge(t, AdvertiserOutcome::seated(1, true, true)) == 7);
  // shown third without a click: nothing true
  CHECK(charge(t, AdvertiserOutcome::seated(3, false, false)) == 0);
  // clicked in slot 2, no purchase: only the slot row
  CHECK(charge(t, AdvertiserOutcome::seated(2, true, false)) == 2);
}

TEST_CASE("duplicate formulas merge by summing") {
  BidsTable t({{Formula::click(), 3}, {Formula::click(), 4}, {Formula::conv(), 1}});
  REQUIRE(t.size() == 2);
  CHECK(t.rows()[0].value == 7);
  CHECK(t.rows()[0].formula == Formula::click());
  CHECK(t.rows()[1].formula == Formula::conv());
}

TEST_CASE("charge equals the row-by-row sum on every outcome (exhaustive, k <= 4)") {
  std::mt19937_64 rng(11);
  const int k = 4;
  std::uniform_int_distribution<Money> value(0, 20);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<BidRow> rows;
    std::uniform_int_distribution<int> nrows(0, 4);
    const int m = nrows(rng);
    for (int r = 0; r < m; ++r) {
      std::uniform_int_distribution<int> pick(0, 3);
      Formula f = Formula::click();
      switch (pick(rng)) {
        case 0: f = Formula::click(); break;
        case 1: f = Formula::conv(); break;
        case 2: f = Formula::slot(1 + static_cast<int>(rng() % k)); break;
        case 3: f = !Formula::slot(1 + static_cast<int>(rng() % k)); break;
      }
      rows.push_back({f, value(rng)});
    }
    const BidsTable t(rows);

    // enumerate every outcome: unassigned, and (slot, click, conv) triples
    std::vector<AdvertiserOutcome> outcomes{AdvertiserOutcome::unassigned()};
    for (int slot = 1; slot <= k; ++slot) {
      outcomes.push_back(AdvertiserOutcome::seated(slot, false, false));
      outcomes.push_back(AdvertiserOutcome::seated(slot, true, false));
      outcomes.push_back(AdvertiserOutcome::seated(slot, true, true));
    }
    for (const auto& o : outcomes) {
      Money expected = 0;
      for (const auto& row : t.rows())
        if (eval_formula(row.formula, o)) expected += row.value;
      CHECK(charge(t, o) == expected);
    }
  }
}

TEST_CASE("charge is monotone in added rows") {
  std::mt19937_64 rng(13);
  const BidsTable base = example_table();
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<BidRow> rows = base.rows();
    rows.push_back({Formula::slot(1 + static_cast<int>(rng() % 3)), static_cast<Money>(rng() % 10)});
    const BidsTable bigger(rows);
    for (int slot = 1; slot <= 3; ++slot) {
      const auto o = AdvertiserOutcome::seated(slot, true, rng() % 2 == 0);
      CHECK(charge(bigger, o) >= charge(base, o));
    }
  }
}

TEST_CASE("validate_bid accepts the example table") {
  CHECK(validate_bid(example_table(), 3).ok);
}

TEST_CASE("validate_bid rejects negative values and out-of-range slots") {
  BidsTable negative({{Formula::click(), -1}});
  const auto v1 = validate_bid(negative, 3);
  CHECK_FALSE(v1.ok);
  REQUIRE(v1.issues.size() == 1);
  CHECK(v1.issues[0].row == 0);

  BidsTable out_of_range({{Formula::click(), 5}, {Formula::slot(9), 5}});
  const auto v2 = validate_bid(out_of_range, 3);
  CHECK_FALSE(v2.ok);
  REQUIRE(v2.issues.size() == 1);
  CHECK(v2.issues[0].row == 1);
}

TEST_CASE("bids JSON round-trips and validates") {
  const BidsTable t = example_table();
  const auto j = adex::model::bids_to_json(t);
  CHECK(adex::model::bids_from_json(j, 3) == t);
  CHECK(validate_bids_json(j, 3).ok);

  nlohmann::json bad = nlohmann::json::array();
  bad.push_back({{"formula", "slot7"}, {"value", 2}});
  bad.push_back({{"formula", "conv"}, {"value", -3}});
  const auto v = validate_bids_json(bad, 3);
  CHECK_FALSE(v.ok);
  CHECK(v.issues.size() == 2);
}
