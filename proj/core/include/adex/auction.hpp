#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adex/bids.hpp"
#include "adex/matching.hpp"
#include "adex/model.hpp"
#include "adex/probability.hpp"

namespace adex::auction {

using model::Allocation;
using model::AdvertiserOutcome;
using model::BidsTable;
using prob::ClickModel;
using prob::HwPattern;
using prob::RevenueMatrix;

enum class Method { BF, H, RH, RHTALU };
enum class Pricing { PAY_AS_BID, GSP, VCG };

std::string to_string(Method m);
std::string to_string(Pricing p);
Method method_from_string(const std::string& s);
Pricing pricing_from_string(const std::string& s);

struct AuctionConfig {
  int slot_count = 1;
  Method method = Method::RH;
  Pricing pricing = Pricing::GSP;
  std::optional<std::vector<bool>> hw_labels;  // per advertiser: heavyweight?
  unsigned topk_threads = 1;                   // >1 enables the parallel top-k fold
};

struct WinnerDetermination {
  Allocation allocation;
  double expected_total = 0.0;  // sum(r0) + matching total
  RevenueMatrix revenue;
};

// Builds the revenue matrix and runs the configured matching method over the
// residual weights. Every method produces the canonical allocation, so they
// agree exactly, not just in total. RHTALU degenerates to RH here: the
// threshold-scan machinery only pays off inside the simulation engine where
// persistent sorted indexes exist.
WinnerDetermination determine_winners(const std::vector<BidsTable>& bids, const ClickModel& m,
                                      const AuctionConfig& cfg);

// Click/conversion probabilities conditioned on which slots hold heavyweight
// advertisers. Stored per (advertiser, slot, pattern); entries whose pattern
// bit at the advertiser's own slot disagrees with the advertiser's class are
// never used, so the representation is effectively k * 2^(k-1) per advertiser.
class PatternClickModel {
 public:
  PatternClickModel(int advertisers, int slots, std::vector<bool> hw_labels);

  int advertisers() const { return n_; }
  int slots() const { return k_; }
  int patterns() const { return 1 << k_; }
  const std::vector<bool>& hw_labels() const { return labels_; }
  bool is_heavyweight(AdvertiserId i) const { return labels_[static_cast<std::size_t>(i)]; }

  double w(AdvertiserId i, int slot, unsigned pattern) const { return w_[index(i, slot, pattern)]; }
  double c(AdvertiserId i, int slot, unsigned pattern) const { return c_[index(i, slot, pattern)]; }
  void set(AdvertiserId i, int slot, unsigned pattern, double w, double c);

  // n x k model with every entry conditioned on the fixed pattern.
  ClickModel slice(unsigned pattern) const;

  static std::vector<bool> pattern_bits(unsigned pattern, int slots);

 private:
  std::size_t index(AdvertiserId i, int slot, unsigned pattern) const;
  int n_ = 0;
  int k_ = 0;
  std::vector<bool> labels_;
  std::vector<double> w_;
  std::vector<double> c_;
};

struct HeavyweightResult {
  Allocation allocation;
  std::vector<bool> pattern;  // bit j-1: slot j was matched to a heavyweight
  double total = 0.0;
};

// Tries every pattern of heavyweight slots: slots inside the pattern are
// force-filled by heavyweights (patterns needing more heavyweights than exist
// are skipped), slots outside are matched to lightweights and may stay empty.
// Returns the best (pattern, combined allocation) with the canonical
// tie-break across patterns.
HeavyweightResult solve_heavyweight(const std::vector<BidsTable>& bids,
                                    const PatternClickModel& m, const AuctionConfig& cfg);

// Per-winner pricing. For GSP, value[i] is the per-click price; for VCG,
// vcg_payment[i] is the lump-sum opportunity cost and value[i] the equivalent
// per-click price (payment / click probability). PAY_AS_BID charges are
// computed at settlement from the realized outcome.
struct PriceRule {
  Pricing scheme = Pricing::GSP;
  std::vector<double> value;        // per-click price per advertiser, 0 for non-winners
  std::vector<double> vcg_payment;  // VCG only: lump-sum payments
};

PriceRule price(const Allocation& allocation, const std::vector<BidsTable>& bids,
                const ClickModel& m, const RevenueMatrix& revenue, const AuctionConfig& cfg);

// Seeded user behaviour: every seated advertiser independently draws a click
// with probability w(i, slot) and, if clicked, a conversion with c(i, slot).
// Unseated advertisers keep the no-click outcome. Deterministic per seed.
std::vector<AdvertiserOutcome> simulate_user(const Allocation& allocation, const ClickModel& m,
                                             std::uint64_t seed, int advertisers,
                                             const HwPattern& hw_pattern = std::nullopt);

struct SettlementRecord {
  AdvertiserId advertiser = 0;
  std::optional<int> slot;
  bool clicked = false;
  bool converted = false;
  Money charge = 0;
  double expected_value = 0.0;  // r(i, slot) at assignment, r0[i] if unseated

  bool operator==(const SettlementRecord&) const = default;
};

// Applies the pricing rule to realized outcomes. GSP and VCG charge per click
// (no click, no charge); PAY_AS_BID charges the realized formula sum, which
// can be positive even for unseated advertisers. Emits one record per
// advertiser that was seated or owes a non-zero charge.
std::vector<SettlementRecord> settle(
    const Allocation& allocation, const PriceRule& rule,
    const std::vector<AdvertiserOutcome>& outcomes,
    const std::function<const BidsTable&(AdvertiserId)>& bids_of,
    const std::function<double(AdvertiserId)>& expected_value_of);

nlohmann::json settlement_to_json(const SettlementRecord& r);
nlohmann::json settlements_to_json(const std::vector<SettlementRecord>& records);

}  // namespace adex::auction
