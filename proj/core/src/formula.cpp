#include "adex/formula.hpp"

#include <cctype>
#include <sstream>

namespace adex::model {

namespace {

std::shared_ptr<const Formula::Node> make_node(Formula::Kind kind, int index = 0,
                                               std::shared_ptr<const Formula::Node> a = nullptr,
                                               std::shared_ptr<const Formula::Node> b = nullptr) {
  auto n = std::make_shared<Formula::Node>();
  n->kind = kind;
  n->index = index;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

}  // namespace

Formula Formula::slot(int index) {
  if (index < 1) throw std::invalid_argument("slot index must be positive");
  return Formula(make_node(Kind::Slot, index));
}

Formula Formula::click() { return Formula(make_node(Kind::Click)); }
Formula Formula::conv() { return Formula(make_node(Kind::Conv)); }

Formula Formula::hw(int index) {
  if (index < 1) throw std::invalid_argument("hw index must be positive");
  return Formula(make_node(Kind::Hw, index));
}

Formula operator!(Formula f) {
  return Formula(make_node(Formula::Kind::Not, 0, std::move(f.node_)));
}

Formula operator&(Formula a, Formula b) {
  return Formula(make_node(Formula::Kind::And, 0, std::move(a.node_), std::move(b.node_)));
}

Formula operator|(Formula a, Formula b) {
  return Formula(make_node(Formula::Kind::Or, 0, std::move(a.node_), std::move(b.node_)));
}

int Formula::slot_index() const {
  if (kind() != Kind::Slot && kind() != Kind::Hw)
    throw std::logic_error("slot_index on non-indexed node");
  return node_->index;
}

Formula Formula::child() const {
  if (kind() != Kind::Not) throw std::logic_error("child on non-Not node");
  return Formula(node_->a);
}

Formula Formula::left() const {
  if (kind() != Kind::And && kind() != Kind::Or) throw std::logic_error("left on leaf node");
  return Formula(node_->a);
}

Formula Formula::right() const {
  if (kind() != Kind::And && kind() != Kind::Or) throw std::logic_error("right on leaf node");
  return Formula(node_->b);
}

namespace {

int max_slot_rec(const Formula::Node* n) {
  if (!n) return 0;
  int best = 0;
  if (n->kind == Formula::Kind::Slot || n->kind == Formula::Kind::Hw) best = n->index;
  best = std::max(best, max_slot_rec(n->a.get()));
  best = std::max(best, max_slot_rec(n->b.get()));
  return best;
}

bool mentions_hw_rec(const Formula::Node* n) {
  if (!n) return false;
  if (n->kind == Formula::Kind::Hw) return true;
  return mentions_hw_rec(n->a.get()) || mentions_hw_rec(n->b.get());
}

bool equal_rec(const Formula::Node* x, const Formula::Node* y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind || x->index != y->index) return false;
  return equal_rec(x->a.get(), y->a.get()) && equal_rec(x->b.get(), y->b.get());
}

// Precedence: Or = 0, And = 1, Not = 2, atoms = 3. Binary operators are
// printed left-associative; a right child at the same precedence keeps its
// parentheses so printing is injective.
void print_rec(std::ostringstream& out, const Formula::Node* n, int min_prec) {
  switch (n->kind) {
    case Formula::Kind::Slot:
      out << "slot" << n->index;
      return;
    case Formula::Kind::Click:
      out << "click";
      return;
    case Formula::Kind::Conv:
      out << "conv";
      return;
    case Formula::Kind::Hw:
      out << "hw" << n->index;
      return;
    case Formula::Kind::Not:
      out << "!";
      print_rec(out, n->a.get(), 2);
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      const bool is_and = n->kind == Formula::Kind::And;
      const int prec = is_and ? 1 : 0;
      const bool parens = prec < min_prec;
      if (parens) out << "(";
      print_rec(out, n->a.get(), prec);
      out << (is_and ? " & " : " | ");
      print_rec(out, n->b.get(), prec + 1);
      if (parens) out << ")";
      return;
    }
  }
}

}  // namespace

int Formula::max_slot_index() const { return max_slot_rec(node_.get()); }
bool Formula::mentions_hw() const { return mentions_hw_rec(node_.get()); }

bool Formula::operator==(const Formula& other) const {
  return equal_rec(node_.get(), other.node_.get());
}

std::string Formula::to_string() const {
  std::ostringstream out;
  print_rec(out, node_.get(), 0);
  return out.str();
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int slot_count) : text_(text), k_(slot_count) {}

  Formula parse() {
    Formula f = parse_or();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return f;
  }

 private:
  Formula parse_or() {
    Formula f = parse_and();
    while (true) {
      skip_ws();
      if (!consume('|')) return f;
      f = std::move(f) | parse_and();
    }
  }

  Formula parse_and() {
    Formula f = parse_not();
    while (true) {
      skip_ws();
      if (!consume('&')) return f;
      f = std::move(f) & parse_not();
    }
  }

  Formula parse_not() {
    skip_ws();
    if (consume('!')) return !parse_not();
    return parse_atom();
  }

  Formula parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of formula", pos_);
    if (consume('(')) {
      Formula f = parse_or();
      skip_ws();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      return f;
    }
    const std::size_t start = pos_;
    std::string word = read_word();
    if (word == "click") return Formula::click();
    if (word == "conv") return Formula::conv();
    if (word == "slot") return Formula::slot(read_index(start));
    if (word == "hw") return Formula::hw(read_index(start));
    throw ParseError("unknown predicate '" + word + "'", start);
  }

  int read_index(std::size_t word_start) {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      throw ParseError("expected slot index", pos_);
    long value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      if (value > 1'000'000) throw ParseError("slot index too large", start);
      ++pos_;
    }
    if (value < 1 || value > k_)
      throw ParseError("slot index " + std::to_string(value) + " out of range 1.." +
                           std::to_string(k_),
                       word_start);
    return static_cast<int>(value);
  }

  std::string read_word() {
    std::string word;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text_[pos_]))));
      ++pos_;
    }
    if (word.empty()) throw ParseError("expected predicate", pos_);
    return word;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string_view text_;
  int k_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text, int slot_count) {
  if (slot_count < 1) throw std::invalid_argument("slot count must be at least 1");
  return Parser(text, slot_count).parse();
}

namespace {

bool eval_rec(const Formula& f, const AdvertiserOutcome& o) {
  switch (f.kind()) {
    case Formula::Kind::Slot:
      return o.slot.has_value() && *o.slot == f.slot_index();
    case Formula::Kind::Click:
      return o.clicked;
    case Formula::Kind::Conv:
      return o.converted;
    case Formula::Kind::Hw: {
      if (!o.hw_pattern.has_value())
        throw EvalError("hw predicate evaluated without a heavyweight pattern");
      const auto& bits = *o.hw_pattern;
      const int j = f.slot_index();
      if (j > static_cast<int>(bits.size()))
        throw EvalError("hw index exceeds pattern length");
      return bits[static_cast<std::size_t>(j - 1)];
    }
    case Formula::Kind::Not:
      return !eval_rec(f.child(), o);
    case Formula::Kind::And:
      return eval_rec(f.left(), o) && eval_rec(f.right(), o);
    case Formula::Kind::Or:
      return eval_rec(f.left(), o) || eval_rec(f.right(), o);
  }
  throw std::logic_error("unreachable");
}

}  // namespace

bool eval_formula(const Formula& f, const AdvertiserOutcome& o) { return eval_rec(f, o); }

}  // namespace adex::model
