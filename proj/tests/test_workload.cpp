#include <doctest.h>

#include "adex/workload.hpp"

using adex::Money;
using adex::bench::gen_workload;
using adex::bench::Workload;
using adex::bench::WorkloadSpec;

namespace {

WorkloadSpec small_spec() {
  WorkloadSpec spec;
  spec.advertisers = 20;
  spec.slots = 5;
  spec.num_keywords = 4;
  spec.auctions = 30;
  spec.seed = 42;
  return spec;
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
  const auto a = workload_to_json(gen_workload(small_spec()));
  const auto b = workload_to_json(gen_workload(small_spec()));
  CHECK(a.dump() == b.dump());

  WorkloadSpec other = small_spec();
  other.seed = 43;
  CHECK(workload_to_json(gen_workload(other)).dump() != a.dump());
}

TEST_CASE("every advertiser has at least one nonzero click value") {
  WorkloadSpec spec = small_spec();
  spec.advertisers = 200;
  spec.value_max = 2;  // make all-zero draws likely enough to matter
  const Workload w = gen_workload(spec);
  for (const auto& adv : w.advertisers) {
    Money best = 0;
    for (const auto& row : adv.program.keywords) best = std::max(best, row.maxbid);
    CHECK(best >= 1);
    CHECK(adv.program.target_spend_rate >= 1.0);
    CHECK(adv.program.target_spend_rate <= static_cast<double>(best));
  }
}

TEST_CASE("higher slots draw from strictly higher click intervals") {
  const Workload w = gen_workload(small_spec());
  const auto& m = w.click_model;
  double min_top = 1.0, max_bottom = 0.0;
  for (int i = 0; i < m.advertisers(); ++i) {
    min_top = std::min(min_top, m.w(static_cast<std::size_t>(i), 0));
    max_bottom = std::max(max_bottom, m.w(static_cast<std::size_t>(i),
                                          static_cast<std::size_t>(m.slots() - 1)));
  }
  CHECK(min_top > max_bottom);
  for (int i = 0; i < m.advertisers(); ++i)
    for (int j = 0; j < m.slots(); ++j) {
      CHECK(m.w(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) >= 0.1);
      CHECK(m.w(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) <= 0.9);
    }
}

TEST_CASE("conversions default to zero with an opt-in sampler") {
  const Workload w = gen_workload(small_spec());
  for (int i = 0; i < w.click_model.advertisers(); ++i)
    for (int j = 0; j < w.click_model.slots(); ++j)
      CHECK(w.click_model.c(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) == 0.0);

  WorkloadSpec conv = small_spec();
  conv.sample_conversions = true;
  const Workload wc = gen_workload(conv);
  bool any = false;
  for (int i = 0; i < wc.click_model.advertisers(); ++i)
    for (int j = 0; j < wc.click_model.slots(); ++j) {
      const double c = wc.click_model.c(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      CHECK(c >= 0.0);
      CHECK(c <= 0.2);
      any = any || c > 0.0;
    }
  CHECK(any);
}

TEST_CASE("queries arrive at a constant rate with known keywords") {
  const Workload w = gen_workload(small_spec());
  REQUIRE(w.queries.size() == 30);
  for (std::size_t q = 0; q < w.queries.size(); ++q) {
    CHECK(w.queries[q].time == doctest::Approx(static_cast<double>(q + 1)));
    CHECK(std::find(w.keywords.begin(), w.keywords.end(), w.queries[q].keyword) !=
          w.keywords.end());
  }
}

TEST_CASE("initial bids respect their maxbid") {
  const Workload w = gen_workload(small_spec());
  for (const auto& adv : w.advertisers)
    for (const auto& row : adv.program.keywords) {
      CHECK(row.bid >= 0);
      CHECK(row.bid <= row.maxbid);
      CHECK(row.formula == adex::model::Formula::click());
    }
}

TEST_CASE("workload JSON round-trips") {
  const Workload w = gen_workload(small_spec());
  const auto j = workload_to_json(w);
  const Workload back = adex::bench::workload_from_json(j);
  CHECK(workload_to_json(back).dump() == j.dump());
  CHECK(back.slots == w.slots);
  CHECK(back.advertisers.size() == w.advertisers.size());
  CHECK(back.seed == w.seed);
}

TEST_CASE("invalid specs are rejected") {
  WorkloadSpec bad = small_spec();
  bad.advertisers = 0;
  CHECK_THROWS_AS(gen_workload(bad), std::invalid_argument);
  bad = small_spec();
  bad.click_low = 0.9;
  bad.click_high = 0.1;
  CHECK_THROWS_AS(gen_workload(bad), std::invalid_argument);
}
