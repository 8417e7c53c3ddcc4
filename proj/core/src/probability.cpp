#include "adex/probability.hpp"

#include <cmath>
#include <stdexcept>

namespace adex::prob {

using model::AdvertiserOutcome;

ClickModel::ClickModel(Matrix w_, Matrix c_) : w(std::move(w_)), c(std::move(c_)) {
  if (w.rows() != c.rows() || w.cols() != c.cols())
    throw std::invalid_argument("click and conversion matrices must agree in shape");
  for (double v : w.data())
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("click probability outside [0,1]");
  for (double v : c.data())
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("conversion probability outside [0,1]");
}

ClickModel ClickModel::uniform(int advertisers, int slots, double click_p, double conv_p) {
  return ClickModel(Matrix(advertisers, slots, click_p), Matrix(advertisers, slots, conv_p));
}

nlohmann::json click_model_to_json(const ClickModel& m) {
  auto matrix_rows = [](const Matrix& mat) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < mat.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t j = 0; j < mat.cols(); ++j) row.push_back(mat(i, j));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  return {{"w", matrix_rows(m.w)}, {"c", matrix_rows(m.c)}};
}

ClickModel click_model_from_json(const nlohmann::json& j) {
  auto read_matrix = [](const nlohmann::json& rows) {
    if (!rows.is_array()) throw std::invalid_argument("click model matrix must be an array");
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows[0].size();
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw std::invalid_argument("ragged click model matrix");
      for (std::size_t k = 0; k < c; ++k) m(i, k) = rows[i][k].get<double>();
    }
    return m;
  };
  return ClickModel(read_matrix(j.at("w")), read_matrix(j.at("c")));
}

double formula_probability(const Formula& f, AdvertiserId i, std::optional<int> slot,
                           const ClickModel& m, const HwPattern& hw_pattern) {
  AdvertiserOutcome o;
  o.hw_pattern = hw_pattern;
  if (!slot.has_value()) {
    // unseated advertisers never click: a single atom of probability 1
    return model::eval_formula(f, o) ? 1.0 : 0.0;
  }
  const int j = *slot;
  if (j < 1 || j > m.slots()) throw std::out_of_range("slot index out of range");
  const double w = m.w(static_cast<std::size_t>(i), static_cast<std::size_t>(j - 1));
  const double c = m.c(static_cast<std::size_t>(i), static_cast<std::size_t>(j - 1));
  o.slot = j;

  double p = 0.0;
  o.clicked = false;
  o.converted = false;
  if (model::eval_formula(f, o)) p += 1.0 - w;
  o.clicked = true;
  if (model::eval_formula(f, o)) p += w * (1.0 - c);
  o.converted = true;
  if (model::eval_formula(f, o)) p += w * c;
  return p;
}

double expected_value(const BidsTable& table, AdvertiserId i, std::optional<int> slot,
                      const ClickModel& m, const HwPattern& hw_pattern) {
  double total = 0.0;
  for (const model::BidRow& row : table.rows())
    total += static_cast<double>(row.value) * formula_probability(row.formula, i, slot, m, hw_pattern);
  return total;
}

RevenueMatrix revenue_matrix(const std::vector<BidsTable>& bids, const ClickModel& m,
                             const HwPattern& hw_pattern) {
  const int n = m.advertisers();
  const int k = m.slots();
  if (static_cast<int>(bids.size()) != n)
    throw std::invalid_argument("bids and click model disagree on advertiser count");

  RevenueMatrix rm;
  rm.r = Matrix(n, k);
  rm.r0.resize(static_cast<std::size_t>(n));
  rm.residual = Matrix(n, k);
  for (int i = 0; i < n; ++i) {
    rm.r0[static_cast<std::size_t>(i)] =
        expected_value(bids[static_cast<std::size_t>(i)], i, std::nullopt, m, hw_pattern);
    for (int j = 1; j <= k; ++j) {
      const double r = expected_value(bids[static_cast<std::size_t>(i)], i, j, m, hw_pattern);
      rm.r(i, j - 1) = r;
      rm.residual(i, j - 1) = r - rm.r0[static_cast<std::size_t>(i)];
    }
  }
  return rm;
}

SeparabilityResult is_separable(const Matrix& w, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("tolerance must be positive");
  SeparabilityResult res;
  const std::size_t n = w.rows();
  const std::size_t k = w.cols();

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t i2 = i + 1; i2 < n; ++i2)
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t j2 = j + 1; j2 < k; ++j2) {
          const double minor = w(i, j) * w(i2, j2) - w(i, j2) * w(i2, j);
          if (std::abs(minor) > tol) return res;  // not separable
        }

  res.separable = true;

  // factor recovery: pivot on the largest entry; zero rows/columns get 0
  std::size_t pi = 0, pj = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (std::abs(w(i, j)) > best) {
        best = std::abs(w(i, j));
        pi = i;
        pj = j;
      }

  res.adv_factors.assign(n, 0.0);
  res.slot_factors.assign(k, 0.0);
  if (n == 0 || k == 0 || best <= 0.0) return res;  // all-zero matrix: zero factors

  for (std::size_t i = 0; i < n; ++i) res.adv_factors[i] = w(i, pj);
  for (std::size_t j = 0; j < k; ++j) res.slot_factors[j] = w(pi, j) / w(pi, pj);
  return res;
}

}  // namespace adex::prob
