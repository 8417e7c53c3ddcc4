#include "adex/auction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

namespace adex::auction {

std::string to_string(Method m) {
  switch (m) {
    case Method::BF: return "BF";
    case Method::H: return "H";
    case Method::RH: return "RH";
    case Method::RHTALU: return "RHTALU";
  }
  return "?";
}

std::string to_string(Pricing p) {
  switch (p) {
    case Pricing::PAY_AS_BID: return "pay_as_bid";
    case Pricing::GSP: return "gsp";
    case Pricing::VCG: return "vcg";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "BF" || s == "bf") return Method::BF;
  if (s == "H" || s == "h") return Method::H;
  if (s == "RH" || s == "rh") return Method::RH;
  if (s == "RHTALU" || s == "rhtalu") return Method::RHTALU;
  throw std::invalid_argument("unknown method '" + s + "'");
}

Pricing pricing_from_string(const std::string& s) {
  if (s == "pay_as_bid" || s == "pab") return Pricing::PAY_AS_BID;
  if (s == "gsp") return Pricing::GSP;
  if (s == "vcg") return Pricing::VCG;
  throw std::invalid_argument("unknown pricing scheme '" + s + "'");
}

WinnerDetermination determine_winners(const std::vector<BidsTable>& bids, const ClickModel& m,
                                      const AuctionConfig& cfg) {
  WinnerDetermination out;
  const int n = static_cast<int>(bids.size());
  const int k = cfg.slot_count;
  if (k < 1) throw std::invalid_argument("slot count must be at least 1");
  if (n == 0) {
    out.allocation = Allocation(k);
    return out;
  }
  if (m.advertisers() != n || m.slots() != k)
    throw std::invalid_argument("click model shape does not match bids/config");

  out.revenue = prob::revenue_matrix(bids, m);
  matching::WeightedBipartite g{out.revenue.residual};

  matching::MatchResult match;
  switch (cfg.method) {
    case Method::BF:
      match = matching::brute_force_match(g);
      break;
    case Method::H:
      match = matching::hungarian(g);
      break;
    case Method::RH:
    case Method::RHTALU:
      match = matching::solve_reduced(g, cfg.topk_threads);
      break;
  }

  double total = 0.0;
  for (double r0 : out.revenue.r0) total += r0;
  out.expected_total = total + match.total;
  out.allocation = std::move(match.allocation);
  return out;
}

PatternClickModel::PatternClickModel(int advertisers, int slots, std::vector<bool> hw_labels)
    : n_(advertisers), k_(slots), labels_(std::move(hw_labels)) {
  if (static_cast<int>(labels_.size()) != n_)
    throw std::invalid_argument("one heavyweight label per advertiser required");
  if (k_ < 1 || k_ > 20) throw std::invalid_argument("slot count out of range");
  const std::size_t cells = static_cast<std::size_t>(n_) * static_cast<std::size_t>(k_)
                            * (static_cast<std::size_t>(1) << k_);
  w_.assign(cells, 0.0);
  c_.assign(cells, 0.0);
}

std::size_t PatternClickModel::index(AdvertiserId i, int slot, unsigned pattern) const {
  if (slot < 1 || slot > k_) throw std::out_of_range("slot index out of range");
  if (pattern >= static_cast<unsigned>(1 << k_)) throw std::out_of_range("pattern out of range");
  return (static_cast<std::size_t>(i) * static_cast<std::size_t>(k_) +
          static_cast<std::size_t>(slot - 1)) *
             (static_cast<std::size_t>(1) << k_) +
         pattern;
}

void PatternClickModel::set(AdvertiserId i, int slot, unsigned pattern, double w, double c) {
  if (!(w >= 0.0 && w <= 1.0 && c >= 0.0 && c <= 1.0))
    throw std::invalid_argument("probability outside [0,1]");
  w_[index(i, slot, pattern)] = w;
  c_[index(i, slot, pattern)] = c;
}

ClickModel PatternClickModel::slice(unsigned pattern) const {
  Matrix w(static_cast<std::size_t>(n_), static_cast<std::size_t>(k_));
  Matrix c(static_cast<std::size_t>(n_), static_cast<std::size_t>(k_));
  for (int i = 0; i < n_; ++i)
    for (int j = 1; j <= k_; ++j) {
      w(static_cast<std::size_t>(i), static_cast<std::size_t>(j - 1)) = this->w(i, j, pattern);
      c(static_cast<std::size_t>(i), static_cast<std::size_t>(j - 1)) = this->c(i, j, pattern);
    }
  return ClickModel(std::move(w), std::move(c));
}

std::vector<bool> PatternClickModel::pattern_bits(unsigned pattern, int slots) {
  std::vector<bool> bits(static_cast<std::size_t>(slots), false);
  for (int j = 0; j < slots; ++j) bits[static_cast<std::size_t>(j)] = (pattern >> j) & 1u;
  return bits;
}

HeavyweightResult solve_heavyweight(const std::vector<BidsTable>& bids,
                                    const PatternClickModel& m, const AuctionConfig& cfg) {
  const int n = m.advertisers();
  const int k = m.slots();
  if (static_cast<int>(bids.size()) != n)
    throw std::invalid_argument("bids and model disagree on advertiser count");
  if (cfg.slot_count != k) throw std::invalid_argument("config and model disagree on slots");

  std::vector<AdvertiserId> heavies;
  std::vector<AdvertiserId> lights;
  for (AdvertiserId i = 0; i < n; ++i)
    (m.is_heavyweight(i) ? heavies : lights).push_back(i);

  bool have_best = false;
  HeavyweightResult best;

  for (unsigned pattern = 0; pattern < (1u << k); ++pattern) {
    const int heavy_slots = std::popcount(pattern);
    // a pattern claims exactly the slots filled by heavyweights, so it needs
    // that many of them; slots outside the pattern may stay empty
    if (heavy_slots > static_cast<int>(heavies.size())) continue;

    const ClickModel slice = m.slice(pattern);
    const auto bits = PatternClickModel::pattern_bits(pattern, k);
    const RevenueMatrix rm = prob::revenue_matrix(bids, slice, bits);

    std::vector<int> hw_slot_ids;
    std::vector<int> lw_slot_ids;
    for (int j = 1; j <= k; ++j)
      ((pattern >> (j - 1)) & 1u ? hw_slot_ids : lw_slot_ids).push_back(j);

    double total = 0.0;
    for (double r0 : rm.r0) total += r0;

    Allocation alloc(k);
    try {
      if (!hw_slot_ids.empty()) {
        const auto hk = matching::detail::assign_max_on(rm.residual, heavies, hw_slot_ids, false);
        const Allocation ha = matching::detail::canonical_extract_on(rm.residual, heavies,
                                                                     hw_slot_ids, hk.value, false);
        for (int j : hw_slot_ids)
          if (auto a = ha.advertiser_at(j)) alloc.assign(j, *a);
      }
      if (!lw_slot_ids.empty()) {
        const auto lk = matching::detail::assign_max_on(rm.residual, lights, lw_slot_ids, true);
        const Allocation la = matching::detail::canonical_extract_on(rm.residual, lights,
                                                                     lw_slot_ids, lk.value, true);
        for (int j : lw_slot_ids)
          if (auto a = la.advertiser_at(j)) alloc.assign(j, *a);
      }
    } catch (const std::invalid_argument&) {
      continue;  // infeasible forced sub-assignment
    }

    for (int j = 1; j <= k; ++j)
      if (auto a = alloc.advertiser_at(j))
        total += rm.residual(static_cast<std::size_t>(*a), static_cast<std::size_t>(j - 1));

    const double eps = 1e-9;
    if (!have_best || total > best.total + eps ||
        (total >= best.total - eps && alloc.lex_less(best.allocation))) {
      best.allocation = alloc;
      best.pattern = bits;
      best.total = have_best ? std::max(best.total, total) : total;
      have_best = true;
    }
  }

  if (!have_best) throw std::invalid_argument("no feasible heavyweight pattern");
  return best;
}

PriceRule price(const Allocation& allocation, const std::vector<BidsTable>& bids,
                const ClickModel& m, const RevenueMatrix& revenue, const AuctionConfig& cfg) {
  const int n = static_cast<int>(bids.size());
  PriceRule rule;
  rule.scheme = cfg.pricing;
  rule.value.assign(static_cast<std::size_t>(n), 0.0);
  if (cfg.pricing == Pricing::PAY_AS_BID) return rule;  // charges realized at settlement

  struct Winner {
    AdvertiserId adv;
    int slot;
    double residual;
  };
  std::vector<Winner> winners;
  for (int j = 1; j <= allocation.slot_count(); ++j)
    if (auto a = allocation.advertiser_at(j))
      winners.push_back(
          {*a, j, revenue.residual(static_cast<std::size_t>(*a), static_cast<std::size_t>(j - 1))});

  if (cfg.pricing == Pricing::GSP) {
    // rank winners by their assigned-slot residual; winner r pays, per click,
    // the next-ranked winner's residual scaled by own click probability;
    // the last rank pays the zero reserve
    std::sort(winners.begin(), winners.end(), [](const Winner& a, const Winner& b) {
      if (a.residual != b.residual) return a.residual > b.residual;
      return a.adv < b.adv;
    });
    for (std::size_t r = 0; r < winners.size(); ++r) {
      const double next = r + 1 < winners.size() ? winners[r + 1].residual : 0.0;
      const double w = m.w(static_cast<std::size_t>(winners[r].adv),
                           static_cast<std::size_t>(winners[r].slot - 1));
      if (w <= 0.0) continue;  // the slot earns nothing in expectation; price 0
      double p = next / w;
      p = std::min(p, winners[r].residual / w);  // never above own value per click
      rule.value[static_cast<std::size_t>(winners[r].adv)] = p;
    }
    return rule;
  }

  // VCG: each winner pays the optimum the others could reach without them
  // minus what the others get under the chosen allocation.
  rule.vcg_payment.assign(static_cast<std::size_t>(n), 0.0);
  double chosen_total = 0.0;
  for (const Winner& w : winners) chosen_total += w.residual;

  for (const Winner& win : winners) {
    Matrix without(static_cast<std::size_t>(n > 0 ? n - 1 : 0), revenue.residual.cols());
    std::size_t row = 0;
    for (int i = 0; i < n; ++i) {
      if (i == win.adv) continue;
      for (std::size_t j = 0; j < revenue.residual.cols(); ++j)
        without(row, j) = revenue.residual(static_cast<std::size_t>(i), j);
      ++row;
    }
    double others_optimum = 0.0;
    if (n > 1) {
      matching::WeightedBipartite g{std::move(without)};
      others_optimum = matching::solve_reduced(g).total;
    }
    const double others_under_chosen = chosen_total - win.residual;
    double payment = others_optimum - others_under_chosen;
    payment = std::clamp(payment, 0.0, win.residual);
    rule.vcg_payment[static_cast<std::size_t>(win.adv)] = payment;

    const double w = m.w(static_cast<std::size_t>(win.adv), static_cast<std::size_t>(win.slot - 1));
    // charged per click, so the expected charge equals the lump payment
    rule.value[static_cast<std::size_t>(win.adv)] = w > 0.0 ? payment / w : 0.0;
  }
  return rule;
}

std::vector<AdvertiserOutcome> simulate_user(const Allocation& allocation, const ClickModel& m,
                                             std::uint64_t seed, int advertisers,
                                             const HwPattern& hw_pattern) {
  std::vector<AdvertiserOutcome> outcomes(static_cast<std::size_t>(advertisers));
  for (auto& o : outcomes) o.hw_pattern = hw_pattern;

  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
  };

  for (int j = 1; j <= allocation.slot_count(); ++j) {
    const auto adv = allocation.advertiser_at(j);
    if (!adv) continue;
    AdvertiserOutcome& o = outcomes[static_cast<std::size_t>(*adv)];
    o.slot = j;
    o.clicked =
        uniform() < m.w(static_cast<std::size_t>(*adv), static_cast<std::size_t>(j - 1));
    if (o.clicked)
      o.converted =
          uniform() < m.c(static_cast<std::size_t>(*adv), static_cast<std::size_t>(j - 1));
  }
  return outcomes;
}

std::vector<SettlementRecord> settle(
    const Allocation& allocation, const PriceRule& rule,
    const std::vector<AdvertiserOutcome>& outcomes,
    const std::function<const BidsTable&(AdvertiserId)>& bids_of,
    const std::function<double(AdvertiserId)>& expected_value_of) {
  std::vector<SettlementRecord> records;
  const int n = static_cast<int>(outcomes.size());
  for (int i = 0; i < n; ++i) {
    const AdvertiserOutcome& o = outcomes[static_cast<std::size_t>(i)];

    Money charge_cents = 0;
    switch (rule.scheme) {
      case Pricing::PAY_AS_BID:
        charge_cents = model::charge(bids_of(i), o);
        break;
      case Pricing::GSP:
      case Pricing::VCG:
        // per-click rules: no click, no charge
        if (o.clicked) charge_cents = std::llround(rule.value[static_cast<std::size_t>(i)]);
        break;
    }

    if (!o.slot.has_value() && charge_cents == 0) continue;

    SettlementRecord rec;
    rec.advertiser = i;
    rec.slot = o.slot;
    rec.clicked = o.clicked;
    rec.converted = o.converted;
    rec.charge = charge_cents;
    rec.expected_value = expected_value_of(i);
    records.push_back(rec);
  }
  return records;
}

nlohmann::json settlement_to_json(const SettlementRecord& r) {
  nlohmann::json j{{"advertiser", r.advertiser}, {"clicked", r.clicked},
                   {"converted", r.converted},   {"charge", r.charge},
                   {"expected_value", r.expected_value}};
  if (r.slot.has_value())
    j["slot"] = *r.slot;
  else
    j["slot"] = nullptr;
  return j;
}

nlohmann::json settlements_to_json(const std::vector<SettlementRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) arr.push_back(settlement_to_json(r));
  return arr;
}

}  // namespace adex::auction
