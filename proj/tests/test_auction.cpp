#include <doctest.h>

#include <cmath>
#include <random>

#include "adex/auction.hpp"

using adex::AdvertiserId;
using adex::Matrix;
using adex::Money;
using adex::auction::AuctionConfig;
using adex::auction::determine_winners;
using adex::auction::HeavyweightResult;
using adex::auction::Method;
using adex::auction::PatternClickModel;
using adex::auction::price;
using adex::auction::PriceRule;
using adex::auction::Pricing;
using adex::auction::settle;
using adex::auction::SettlementRecord;
using adex::auction::simulate_user;
using adex::auction::solve_heavyweight;
using adex::model::AdvertiserOutcome;
using adex::model::Allocation;
using adex::model::BidsTable;
using adex::model::Formula;
using adex::prob::ClickModel;
using adex::prob::RevenueMatrix;

namespace {

Matrix make(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

// pay-per-impression tables reproducing the four-advertiser revenue matrix
std::vector<BidsTable> impression_bids(const Matrix& values) {
  std::vector<BidsTable> bids;
  for (std::size_t i = 0; i < values.rows(); ++i) {
    std::vector<adex::model::BidRow> rows;
    for (std::size_t j = 0; j < values.cols(); ++j)
      rows.push_back({Formula::slot(static_cast<int>(j) + 1),
                      static_cast<Money>(std::llround(values(i, j)))});
    bids.push_back(BidsTable(std::move(rows)));
  }
  return bids;
}

AuctionConfig config(int k, Method m, Pricing p = Pricing::GSP) {
  AuctionConfig cfg;
  cfg.slot_count = k;
  cfg.method = m;
  cfg.pricing = p;
  return cfg;
}

}  // namespace

TEST_CASE("winner determination reproduces the four-advertiser optimum for every method") {
  const Matrix values = make({{9, 5}, {8, 7}, {7, 6}, {7, 4}});
  const auto bids = impression_bids(values);
  const ClickModel m = ClickModel::uniform(4, 2, 0.0, 0.0);  // impressions only

  for (Method method : {Method::BF, Method::H, Method::RH}) {
    const auto res = determine_winners(bids, m, config(2, method));
    CHECK(res.expected_total == doctest::Approx(16.0).epsilon(1e-9));
    CHECK(res.allocation.advertiser_at(1) == 0);
    CHECK(res.allocation.advertiser_at(2) == 1);
  }
}

TEST_CASE("no bidders means an empty allocation") {
  const auto res = determine_winners({}, ClickModel::uniform(0, 2, 0.0, 0.0), config(2, Method::RH));
  CHECK(res.expected_total == 0.0);
  CHECK(res.allocation.empty());
}

TEST_CASE("a single click bidder takes the better slot") {
  Matrix w(1, 2);
  w(0, 0) = 0.5;
  w(0, 1) = 0.2;
  const ClickModel m(std::move(w), Matrix(1, 2, 0.0));
  const std::vector<BidsTable> bids{BidsTable({{Formula::click(), 10}})};
  const auto res = determine_winners(bids, m, config(2, Method::RH));
  CHECK(res.allocation.advertiser_at(1) == 0);
  CHECK(res.expected_total == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("methods agree on allocation across random instances") {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const int k = 1 + static_cast<int>(rng() % 3);
    const ClickModel m = ClickModel::uniform(n, k, unit(rng), unit(rng));
    std::vector<BidsTable> bids;
    for (int i = 0; i < n; ++i)
      bids.push_back(BidsTable({{Formula::click(), static_cast<Money>(rng() % 30)},
                                {!Formula::slot(1), static_cast<Money>(rng() % 10)}}));
    const auto bf = determine_winners(bids, m, config(k, Method::BF));
    const auto h = determine_winners(bids, m, config(k, Method::H));
    const auto rh = determine_winners(bids, m, config(k, Method::RH));
    CHECK(h.expected_total == doctest::Approx(bf.expected_total).epsilon(1e-9));
    CHECK(rh.expected_total == doctest::Approx(bf.expected_total).epsilon(1e-9));
    CHECK(h.allocation == bf.allocation);
    CHECK(rh.allocation == bf.allocation);
  }
}

TEST_CASE("VCG with a single bidder and slot charges nothing") {
  Matrix w(1, 1, 0.5);
  const ClickModel m(std::move(w), Matrix(1, 1, 0.0));
  const std::vector<BidsTable> bids{BidsTable({{Formula::click(), 18}})};
  const auto det = determine_winners(bids, m, config(1, Method::RH, Pricing::VCG));
  const auto rule = price(det.allocation, bids, m, det.revenue, config(1, Method::RH, Pricing::VCG));
  CHECK(rule.vcg_payment[0] == doctest::Approx(0.0));
}

TEST_CASE("VCG opportunity cost with k=1 and residuals {9, 7} is 7") {
  Matrix w(2, 1, 1.0);
  const ClickModel m(std::move(w), Matrix(2, 1, 0.0));
  const std::vector<BidsTable> bids{BidsTable({{Formula::click(), 9}}),
                                    BidsTable({{Formula::click(), 7}})};
  const auto det = determine_winners(bids, m, config(1, Method::RH, Pricing::VCG));
  REQUIRE(det.allocation.advertiser_at(1) == 0);
  const auto rule = price(det.allocation, bids, m, det.revenue, config(1, Method::RH, Pricing::VCG));
  CHECK(rule.vcg_payment[0] == doctest::Approx(7.0).epsilon(1e-9));
}

TEST_CASE("GSP per-click price is the next winner's residual over own click probability") {
  // residuals sorted {8, 6, 5}; rank-1 winner has click probability 0.4
  Matrix w = make({{0.4, 0.1}, {0.3, 0.3}, {0.25, 0.2}});
  const ClickModel m(std::move(w), Matrix(3, 2, 0.0));
  const std::vector<BidsTable> bids{BidsTable({{Formula::click(), 20}}),    // 0.4*20 = 8
                                    BidsTable({{Formula::click(), 20}}),    // 0.3*20 = 6
                                    BidsTable({{Formula::click(), 20}})};   // 0.25*20 = 5
  const auto det = determine_winners(bids, m, config(2, Method::RH, Pricing::GSP));
  REQUIRE(det.allocation.advertiser_at(1) == 0);
  REQUIRE(det.allocation.advertiser_at(2) == 1);
  const auto rule = price(det.allocation, bids, m, det.revenue, config(2, Method::RH, Pricing::GSP));
  CHECK(rule.value[0] == doctest::Approx(15.0).epsilon(1e-9));  // 6 / 0.4
  CHECK(rule.value[1] == doctest::Approx(0.0));                 // last rank pays the zero reserve
}

TEST_CASE("GSP with zero click probability charges nothing") {
  Matrix w(2, 2, 0.0);
  w(1, 1) = 0.5;
  const ClickModel m(std::move(w), Matrix(2, 2, 0.0));
  // winner 0 pays per impression, so w = 0 at its slot
  const std::vector<BidsTable> bids{BidsTable({{Formula::slot(1), 9}}),
                                    BidsTable({{Formula::click(), 10}})};
  const auto det = determine_winners(bids, m, config(2, Method::RH, Pricing::GSP));
  REQUIRE(det.allocation.advertiser_at(1) == 0);
  const auto rule = price(det.allocation, bids, m, det.revenue, config(2, Method::RH, Pricing::GSP));
  CHECK(rule.value[0] == 0.0);
}

TEST_CASE("VCG payments are individually rational") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const int k = 1 + static_cast<int>(rng() % 3);
    const ClickModel m = ClickModel::uniform(n, k, 0.2 + 0.8 * unit(rng), unit(rng));
    std::vector<BidsTable> bids;
    for (int i = 0; i < n; ++i)
      bids.push_back(BidsTable({{Formula::click(), static_cast<Money>(rng() % 40)}}));
    const auto cfg = config(k, Method::RH, Pricing::VCG);
    const auto det = determine_winners(bids, m, cfg);
    const auto rule = price(det.allocation, bids, m, det.revenue, cfg);
    for (int j = 1; j <= k; ++j) {
      if (auto adv = det.allocation.advertiser_at(j)) {
        const double payment = rule.vcg_payment[static_cast<std::size_t>(*adv)];
        const double residual = det.revenue.residual(static_cast<std::size_t>(*adv),
                                                     static_cast<std::size_t>(j - 1));
        CHECK(payment >= 0.0);
        CHECK(payment <= residual + 1e-9);
      }
    }
  }
}

TEST_CASE("heavyweight example: one heavy, one light, one slot") {
  PatternClickModel pm(2, 1, {true, false});
  // heavy earns 0.5 click prob in a heavy-marked slot; light 0.3 in a light slot
  pm.set(0, 1, 0b1, 0.5, 0.0);
  pm.set(1, 1, 0b0, 0.3, 0.0);
  const std::vector<BidsTable> bids{BidsTable({{Formula::click(), 10}}),
                                    BidsTable({{Formula::click(), 10}})};
  const auto res = solve_heavyweight(bids, pm, config(1, Method::RH));
  CHECK(res.total == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(res.pattern == std::vector<bool>{true});
  CHECK(res.allocation.advertiser_at(1) == 0);
}

TEST_CASE("all-lightweight pattern-insensitive model degenerates to determine_winners") {
  const int n = 3, k = 2;
  PatternClickModel pm(n, k, std::vector<bool>(n, false));
  Matrix w = make({{0.8, 0.5}, {0.6, 0.4}, {0.3, 0.2}});
  for (int i = 0; i < n; ++i)
    for (int j = 1; j <= k; ++j)
      for (unsigned p = 0; p < 4; ++p)
        pm.set(i, j, p, w(static_cast<std::size_t>(i), static_cast<std::size_t>(j - 1)), 0.0);
  std::vector<BidsTable> bids;
  for (int i = 0; i < n; ++i) bids.push_back(BidsTable({{Formula::click(), 10 + i}}));

  const auto hw = solve_heavyweight(bids, pm, config(k, Method::RH));
  const ClickModel plain(w, Matrix(n, k, 0.0));
  const auto det = determine_winners(bids, plain, config(k, Method::RH));
  CHECK(hw.total == doctest::Approx(det.expected_total).epsilon(1e-9));
}

namespace {

// exhaustive oracle: every injective partial assignment, pattern induced by
// the seated advertisers' labels, total evaluated directly per advertiser
HeavyweightResult heavyweight_oracle(const std::vector<BidsTable>& bids,
                                     const PatternClickModel& pm) {
  const int n = pm.advertisers();
  const int k = pm.slots();
  HeavyweightResult best;
  bool have = false;
  double best_total = 0.0;

  std::vector<int> assign(static_cast<std::size_t>(k), -1);
  std::vector<char> used(static_cast<std::size_t>(n), 0);

  auto evaluate = [&]() {
    unsigned pattern = 0;
    for (int j = 0; j < k; ++j)
      if (assign[static_cast<std::size_t>(j)] >= 0 &&
          pm.is_heavyweight(assign[static_cast<std::size_t>(j)]))
        pattern |= 1u << j;
    const ClickModel slice = pm.slice(pattern);
    const auto bits = PatternClickModel::pattern_bits(pattern, k);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      std::optional<int> slot;
      for (int j = 0; j < k; ++j)
        if (assign[static_cast<std::size_t>(j)] == i) slot = j + 1;
      total += adex::prob::expected_value(bids[static_cast<std::size_t>(i)], i, slot, slice, bits);
    }
    Allocation alloc(k);
    for (int j = 0; j < k; ++j)
      if (assign[static_cast<std::size_t>(j)] >= 0)
        alloc.assign(j + 1, assign[static_cast<std::size_t>(j)]);

    const double eps = 1e-9;
    if (!have || total > best_total + eps ||
        (total >= best_total - eps && alloc.lex_less(best.allocation))) {
      best.allocation = alloc;
      best.pattern = bits;
      best.total = total;
      best_total = std::max(best_total, total);
      have = true;
    }
  };

  auto rec = [&](auto&& self, int slot) -> void {
    if (slot > k) {
      evaluate();
      return;
    }
    self(self, slot + 1);
    for (int a = 0; a < n; ++a) {
      if (used[static_cast<std::size_t>(a)]) continue;
      used[static_cast<std::size_t>(a)] = 1;
      assign[static_cast<std::size_t>(slot - 1)] = a;
      self(self, slot + 1);
      assign[static_cast<std::size_t>(slot - 1)] = -1;
      used[static_cast<std::size_t>(a)] = 0;
    }
  };
  rec(rec, 1);
  best.total = best_total;
  return best;
}

}  // namespace

TEST_CASE("heavyweight solve matches the exhaustive oracle on random instances") {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const int k = 1 + static_cast<int>(rng() % 3);
    std::vector<bool> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = rng() % 2 == 0;
    PatternClickModel pm(n, k, labels);
    for (int i = 0; i < n; ++i)
      for (int j = 1; j <= k; ++j)
        for (unsigned p = 0; p < (1u << k); ++p) pm.set(i, j, p, unit(rng), unit(rng));
    std::vector<BidsTable> bids;
    for (int i = 0; i < n; ++i) {
      std::vector<adex::model::BidRow> rows{{Formula::click(), static_cast<Money>(rng() % 30)}};
      if (rng() % 2 == 0) rows.push_back({Formula::hw(1), static_cast<Money>(rng() % 10)});
      bids.push_back(BidsTable(std::move(rows)));
    }
    const auto got = solve_heavyweight(bids, pm, config(k, Method::RH));
    const auto want = heavyweight_oracle(bids, pm);
    CHECK(got.total == doctest::Approx(want.total).epsilon(1e-9));
    CHECK(got.allocation == want.allocation);
    CHECK(got.pattern == want.pattern);
  }
}

TEST_CASE("user simulation is deterministic and degenerate at the extremes") {
  Allocation alloc(2);
  alloc.assign(1, 0);
  alloc.assign(2, 1);

  const auto sure = simulate_user(alloc, ClickModel::uniform(3, 2, 1.0, 1.0), 1, 3);
  CHECK(sure[0].clicked);
  CHECK(sure[1].clicked);
  CHECK_FALSE(sure[2].clicked);  // unseated

  const auto never = simulate_user(alloc, ClickModel::uniform(3, 2, 0.0, 0.0), 1, 3);
  CHECK_FALSE(never[0].clicked);
  CHECK_FALSE(never[1].clicked);

  const ClickModel m = ClickModel::uniform(3, 2, 0.5, 0.5);
  for (std::uint64_t seed : {7ull, 99ull}) {
    const auto a = simulate_user(alloc, m, seed, 3);
    const auto b = simulate_user(alloc, m, seed, 3);
    CHECK(a == b);
  }
}

TEST_CASE("settlement applies per-click prices only on clicks") {
  Allocation alloc(2);
  alloc.assign(1, 0);
  alloc.assign(2, 1);
  PriceRule rule;
  rule.scheme = Pricing::GSP;
  rule.value = {15.0, 3.0};

  std::vector<AdvertiserOutcome> outcomes{AdvertiserOutcome::seated(1, true, false),
                                          AdvertiserOutcome::seated(2, false, false)};
  const BidsTable empty;
  const auto records = settle(
      alloc, rule, outcomes, [&](AdvertiserId) -> const BidsTable& { return empty; },
      [&](AdvertiserId i) { return i == 0 ? 8.0 : 6.0; });
  REQUIRE(records.size() == 2);
  CHECK(records[0].charge == 15);
  CHECK(records[0].expected_value == 8.0);
  CHECK(records[1].charge == 0);

  // no clicks anywhere: all charges zero
  std::vector<AdvertiserOutcome> quiet{AdvertiserOutcome::seated(1, false, false),
                                       AdvertiserOutcome::seated(2, false, false)};
  for (const auto& r : settle(alloc, rule, quiet,
                              [&](AdvertiserId) -> const BidsTable& { return empty; },
                              [&](AdvertiserId) { return 0.0; }))
    CHECK(r.charge == 0);
}

TEST_CASE("pay-as-bid settles the realized formula sum") {
  const BidsTable t({{Formula::conv(), 5}, {Formula::slot(1) | Formula::slot(2), 2}});
  Allocation alloc(3);
  alloc.assign(1, 0);
  PriceRule rule;
  rule.scheme = Pricing::PAY_AS_BID;
  rule.value = {0.0};
  std::vector<AdvertiserOutcome> outcomes{AdvertiserOutcome::seated(1, true, true)};
  const auto records = settle(
      alloc, rule, outcomes, [&](AdvertiserId) -> const BidsTable& { return t; },
      [&](AdvertiserId) { return 0.0; });
  REQUIRE(records.size() == 1);
  CHECK(records[0].charge == 7);
}

TEST_CASE("settlement records serialize to JSON") {
  SettlementRecord r;
  r.advertiser = 3;
  r.slot = 2;
  r.clicked = true;
  r.charge = 15;
  r.expected_value = 8.5;
  const auto j = adex::auction::settlement_to_json(r);
  CHECK(j["advertiser"] == 3);
  CHECK(j["slot"] == 2);
  CHECK(j["charge"] == 15);
  SettlementRecord unseated;
  unseated.advertiser = 1;
  CHECK(adex::auction::settlement_to_json(unseated)["slot"].is_null());
}
