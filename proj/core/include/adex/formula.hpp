#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "adex/model.hpp"

namespace adex::model {

// Boolean bid formula over the per-advertiser outcome predicates:
// slot j, click, conversion, and "slot j holds a heavyweight".
//
// Immutable value type; nodes are shared, copies are cheap.
class Formula {
 public:
  enum class Kind { Slot, Click, Conv, Hw, Not, And, Or };

  struct Node {
    Kind kind = Kind::Click;
    int index = 0;  // Slot / Hw
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
  };

  Formula() : Formula(click()) {}

  static Formula slot(int index);
  static Formula click();
  static Formula conv();
  static Formula hw(int index);

  Kind kind() const { return node_->kind; }
  int slot_index() const;  // Slot and Hw nodes only
  Formula child() const;   // Not
  Formula left() const;    // And / Or
  Formula right() const;   // And / Or

  // Largest slot index mentioned by any Slot or Hw predicate, 0 if none.
  int max_slot_index() const;
  bool mentions_hw() const;

  bool operator==(const Formula& other) const;

  // Canonical concrete syntax; parse(to_string(f)) reconstructs f exactly.
  std::string to_string() const;

  friend Formula operator!(Formula f);
  friend Formula operator&(Formula a, Formula b);
  friend Formula operator|(Formula a, Formula b);

 private:
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Grammar (case-insensitive keywords, whitespace insignificant):
//   formula := or
//   or      := and ('|' and)*
//   and     := not ('&' not)*
//   not     := '!' not | atom
//   atom    := 'click' | 'conv' | 'slot' INT | 'hw' INT | '(' formula ')'
// Slot and hw indices must lie in 1..slot_count.
Formula parse_formula(std::string_view text, int slot_count);

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Standard Boolean semantics. Slot(j) holds iff the outcome seats the
// advertiser in slot j; Hw(j) reads the outcome's heavyweight pattern and
// throws EvalError when the pattern is absent.
bool eval_formula(const Formula& f, const AdvertiserOutcome& o);

}  // namespace adex::model
