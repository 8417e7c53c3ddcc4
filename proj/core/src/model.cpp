#include "adex/model.hpp"

#include <limits>
#include <sstream>

namespace adex::model {

void Allocation::assign(int slot, AdvertiserId adv) {
  if (adv < 0) throw std::invalid_argument("advertiser id must be non-negative");
  for (std::size_t s = 0; s < by_slot_.size(); ++s) {
    if (by_slot_[s] == adv && s != index(slot))
      throw std::invalid_argument("advertiser already holds another slot");
  }
  by_slot_.at(index(slot)) = adv;
}

std::optional<int> Allocation::slot_of(AdvertiserId adv) const {
  for (std::size_t s = 0; s < by_slot_.size(); ++s)
    if (by_slot_[s] == adv) return static_cast<int>(s) + 1;
  return std::nullopt;
}

int Allocation::seated_count() const {
  int count = 0;
  for (AdvertiserId a : by_slot_)
    if (a != kEmpty) ++count;
  return count;
}

bool Allocation::lex_less(const Allocation& other) const {
  const std::size_t n = std::max(by_slot_.size(), other.by_slot_.size());
  for (std::size_t s = 0; s < n; ++s) {
    // missing or empty slots compare as +infinity
    const long long a = (s < by_slot_.size() && by_slot_[s] != kEmpty)
                            ? by_slot_[s]
                            : std::numeric_limits<long long>::max();
    const long long b = (s < other.by_slot_.size() && other.by_slot_[s] != kEmpty)
                            ? other.by_slot_[s]
                            : std::numeric_limits<long long>::max();
    if (a != b) return a < b;
  }
  return false;
}

std::string to_string(const Allocation& a) {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (int slot = 1; slot <= a.slot_count(); ++slot) {
    if (auto adv = a.advertiser_at(slot)) {
      if (!first) out << ", ";
      out << "slot" << slot << "->" << *adv;
      first = false;
    }
  }
  out << "}";
  return out.str();
}

}  // namespace adex::model
