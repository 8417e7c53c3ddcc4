#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adex/types.hpp"

namespace adex::model {

// Realized outcome for a single advertiser in one auction.
//
// Invariants: a conversion implies a click (purchases happen through the ad's
// link), and an unseated advertiser never receives a click.
struct AdvertiserOutcome {
  std::optional<int> slot;  // 1-based slot index, empty = not shown
  bool clicked = false;
  bool converted = false;
  // Which slots hold heavyweight advertisers, bit j-1 for slot j. Present only
  // in auctions that condition on the heavyweight pattern.
  std::optional<std::vector<bool>> hw_pattern;

  bool valid() const {
    if (converted && !clicked) return false;
    if (!slot.has_value() && clicked) return false;
    return true;
  }

  static AdvertiserOutcome unassigned() { return {}; }

  static AdvertiserOutcome seated(int slot, bool clicked, bool converted) {
    AdvertiserOutcome o;
    o.slot = slot;
    o.clicked = clicked;
    o.converted = converted;
    if (!o.valid()) throw std::invalid_argument("outcome violates click/conversion invariants");
    return o;
  }

  bool operator==(const AdvertiserOutcome&) const = default;
};

// Injective partial map from slot (1..k) to advertiser.
class Allocation {
 public:
  Allocation() = default;
  explicit Allocation(int slot_count) : by_slot_(static_cast<std::size_t>(slot_count), kEmpty) {}

  int slot_count() const { return static_cast<int>(by_slot_.size()); }

  void assign(int slot, AdvertiserId adv);
  void clear_slot(int slot) { by_slot_.at(index(slot)) = kEmpty; }

  std::optional<AdvertiserId> advertiser_at(int slot) const {
    AdvertiserId a = by_slot_.at(index(slot));
    if (a == kEmpty) return std::nullopt;
    return a;
  }

  std::optional<int> slot_of(AdvertiserId adv) const;

  int seated_count() const;
  bool empty() const { return seated_count() == 0; }

  // Lexicographic order over the slot-major vector with empty slots sorting
  // after every advertiser id; this is the deterministic tie-break order used
  // by every winner-determination method.
  bool lex_less(const Allocation& other) const;

  bool operator==(const Allocation&) const = default;

 private:
  static constexpr AdvertiserId kEmpty = -1;
  std::size_t index(int slot) const {
    if (slot < 1 || slot > slot_count()) throw std::out_of_range("slot index out of range");
    return static_cast<std::size_t>(slot - 1);
  }
  std::vector<AdvertiserId> by_slot_;
};

std::string to_string(const Allocation& a);

}  // namespace adex::model
