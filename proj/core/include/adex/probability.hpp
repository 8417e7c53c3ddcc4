#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "adex/bids.hpp"
#include "adex/formula.hpp"
#include "adex/types.hpp"

namespace adex::prob {

using model::BidsTable;
using model::Formula;

// Per-advertiser, per-slot click and conversion probabilities.
// w(i, j) = P(click | advertiser i shown in slot j+1), c(i, j) = P(conversion | click).
struct ClickModel {
  Matrix w;
  Matrix c;

  ClickModel() = default;
  ClickModel(Matrix w_, Matrix c_);

  int advertisers() const { return static_cast<int>(w.rows()); }
  int slots() const { return static_cast<int>(w.cols()); }

  static ClickModel uniform(int advertisers, int slots, double click_p, double conv_p = 0.0);
};

nlohmann::json click_model_to_json(const ClickModel& m);
ClickModel click_model_from_json(const nlohmann::json& j);

// Expected revenue per (advertiser, slot), the unassigned column, and the
// residual edge weights used by the matching step:
//   residual(i, j) = r(i, j) - r0[i].
// Seating an advertiser forgoes the revenue of their unassigned event, so the
// total expected revenue of an allocation is sum(r0) + sum of seated residuals.
struct RevenueMatrix {
  Matrix r;
  std::vector<double> r0;
  Matrix residual;
};

using HwPattern = std::optional<std::vector<bool>>;

// Exact probability that the formula holds for advertiser i under the given
// slot assignment (nullopt = unassigned). Assigned advertisers have three
// atomic outcomes {no click, click without conversion, click with conversion}
// with probabilities {1-w, w(1-c), wc}; unassigned advertisers never click.
double formula_probability(const Formula& f, AdvertiserId i, std::optional<int> slot,
                           const ClickModel& m, const HwPattern& hw_pattern = std::nullopt);

// Sum over rows of value * formula_probability.
double expected_value(const BidsTable& table, AdvertiserId i, std::optional<int> slot,
                      const ClickModel& m, const HwPattern& hw_pattern = std::nullopt);

RevenueMatrix revenue_matrix(const std::vector<BidsTable>& bids, const ClickModel& m,
                             const HwPattern& hw_pattern = std::nullopt);

struct SeparabilityResult {
  bool separable = false;
  std::vector<double> adv_factors;   // present iff separable
  std::vector<double> slot_factors;  // factors are determined only up to scale
};

// A click matrix is separable when it factors into advertiser-specific and
// slot-specific factors, i.e. has rank <= 1. Tested via 2x2 minors:
// |w[i][j]w[i'][j'] - w[i][j']w[i'][j]| <= tol for all pairs. Zero rows and
// columns receive factor 0.
SeparabilityResult is_separable(const Matrix& w, double tol = 1e-9);

}  // namespace adex::prob
