#pragma once

// Minimal infix grammar for numeric conditions:
//
//   inequality := sum comparator sum
//   sum        := product (('+' | '-') product)*
//   product    := unary ('*' unary)*
//   unary      := '-' unary | primary
//   primary    := number | name | '(' sum ')'
//   comparator := '<' | '<=' | '>' | '>=' | '=' | '≤' | '≥'
//   name       := ident ('.' ident)*,  ident := [A-Za-z_][A-Za-z0-9_]*
//
// Only linear expressions are accepted: in a product, at most one factor may
// reference parameters.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scenario/error.hpp"
#include "scenario/interval.hpp"
#include "scenario/json_io.hpp"

namespace scenario {

enum class Comparator { less, less_equal, greater, greater_equal, equal };

inline std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::less: return "<";
    case Comparator::less_equal: return "<=";
    case Comparator::greater: return ">";
    case Comparator::greater_equal: return ">=";
    case Comparator::equal: return "=";
  }
  return "=";
}

inline bool parse_comparator(std::string_view s, Comparator& out) {
  if (s == "<") out = Comparator::less;
  else if (s == "<=" || s == "≤") out = Comparator::less_equal;
  else if (s == ">") out = Comparator::greater;
  else if (s == ">=" || s == "≥") out = Comparator::greater_equal;
  else if (s == "=") out = Comparator::equal;
  else return false;
  return true;
}

/// Exact binary64 comparison; `=` is bit-for-bit value equality.
inline bool compare(double lhs, Comparator c, double rhs) {
  switch (c) {
    case Comparator::less: return lhs < rhs;
    case Comparator::less_equal: return lhs <= rhs;
    case Comparator::greater: return lhs > rhs;
    case Comparator::greater_equal: return lhs >= rhs;
    case Comparator::equal: return lhs == rhs;
  }
  return false;
}

/// True when no pair of points drawn from `lhs` and `rhs` can satisfy `c`.
inline bool never_satisfiable(const Interval& lhs, Comparator c, const Interval& rhs) {
  switch (c) {
    case Comparator::less: return lhs.lo >= rhs.hi;
    case Comparator::less_equal: return lhs.lo > rhs.hi;
    case Comparator::greater: return lhs.hi <= rhs.lo;
    case Comparator::greater_equal: return lhs.hi < rhs.lo;
    case Comparator::equal: return lhs.hi < rhs.lo || rhs.hi < lhs.lo;
  }
  return false;
}

/// Immutable expression tree with value semantics (nodes are shared).
class Expr {
 public:
  enum class Op { number, variable, negate, add, subtract, multiply };

  static Expr number(double v) { return Expr(std::make_shared<Node>(Node{Op::number, v, {}, nullptr, nullptr})); }
  static Expr variable(std::string name) {
    return Expr(std::make_shared<Node>(Node{Op::variable, 0.0, std::move(name), nullptr, nullptr}));
  }
  static Expr negate(Expr e) { return Expr(std::make_shared<Node>(Node{Op::negate, 0.0, {}, e.node_, nullptr})); }
  static Expr binary(Op op, Expr a, Expr b) {
    return Expr(std::make_shared<Node>(Node{op, 0.0, {}, a.node_, b.node_}));
  }

  Op op() const { return node_->op; }
  double value() const { return node_->value; }
  const std::string& name() const { return node_->name; }
  Expr lhs() const { return Expr(node_->lhs); }
  Expr rhs() const { return Expr(node_->rhs); }
  bool is_binary() const { return op() == Op::add || op() == Op::subtract || op() == Op::multiply; }

  friend bool operator==(const Expr& a, const Expr& b) { return equal(a.node_.get(), b.node_.get()); }

  /// Polynomial degree in the parameters (0 = constant, 1 = linear).
  std::size_t degree() const {
    switch (op()) {
      case Op::number: return 0;
      case Op::variable: return 1;
      case Op::negate: return lhs().degree();
      case Op::add:
      case Op::subtract: return std::max(lhs().degree(), rhs().degree());
      case Op::multiply: return lhs().degree() + rhs().degree();
    }
    return 0;
  }

  void collect_variables(std::set<std::string>& out) const {
    if (op() == Op::variable) out.insert(name());
    if (node_->lhs) lhs().collect_variables(out);
    if (node_->rhs) rhs().collect_variables(out);
  }

  std::set<std::string> variables() const {
    std::set<std::string> out;
    collect_variables(out);
    return out;
  }

  template <typename Lookup>  // double(const std::string&)
  double evaluate(const Lookup& lookup) const {
    switch (op()) {
      case Op::number: return value();
      case Op::variable: return lookup(name());
      case Op::negate: return -lhs().evaluate(lookup);
      case Op::add: return lhs().evaluate(lookup) + rhs().evaluate(lookup);
      case Op::subtract: return lhs().evaluate(lookup) - rhs().evaluate(lookup);
      case Op::multiply: return lhs().evaluate(lookup) * rhs().evaluate(lookup);
    }
    return 0.0;
  }

  template <typename Lookup>  // Interval(const std::string&)
  Interval evaluate_interval(const Lookup& lookup) const {
    switch (op()) {
      case Op::number: return Interval::point(value());
      case Op::variable: return lookup(name());
      case Op::negate: return -lhs().evaluate_interval(lookup);
      case Op::add: return lhs().evaluate_interval(lookup) + rhs().evaluate_interval(lookup);
      case Op::subtract: return lhs().evaluate_interval(lookup) - rhs().evaluate_interval(lookup);
      case Op::multiply: return lhs().evaluate_interval(lookup) * rhs().evaluate_interval(lookup);
    }
    return {};
  }

  template <typename Rename>  // std::string(const std::string&)
  Expr rename(const Rename& f) const {
    switch (op()) {
      case Op::number: return *this;
      case Op::variable: return variable(f(name()));
      case Op::negate: return negate(lhs().rename(f));
      default: return binary(op(), lhs().rename(f), rhs().rename(f));
    }
  }

  std::string to_string() const {
    switch (op()) {
      case Op::number: return format_number(value());
      case Op::variable: return name();
      case Op::negate: {
        const Expr x = lhs();
        // "-3" would read back as a literal, "-a * b" as (-a) * b.
        const bool wrap = x.is_binary() || x.op() == Op::number;
        return wrap ? "-(" + x.to_string() + ")" : "-" + x.to_string();
      }
      case Op::add:
      case Op::subtract: {
        const Expr r = rhs();
        const bool wrap = r.op() == Op::add || r.op() == Op::subtract;
        return lhs().to_string() + (op() == Op::add ? " + " : " - ") +
               (wrap ? "(" + r.to_string() + ")" : r.to_string());
      }
      case Op::multiply: {
        const Expr l = lhs();
        const Expr r = rhs();
        const bool wrap_l = l.op() == Op::add || l.op() == Op::subtract;
        const bool wrap_r = r.is_binary();
        return (wrap_l ? "(" + l.to_string() + ")" : l.to_string()) + " * " +
               (wrap_r ? "(" + r.to_string() + ")" : r.to_string());
      }
    }
    return {};
  }

 private:
  struct Node {
    Op op;
    double value;
    std::string name;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static bool equal(const Node* a, const Node* b) {
    if (a == b) return true;
    if (a == nullptr || b == nullptr || a->op != b->op) return false;
    if (a->op == Op::number) return a->value == b->value;
    if (a->op == Op::variable) return a->name == b->name;
    return equal(a->lhs.get(), b->lhs.get()) && equal(a->rhs.get(), b->rhs.get());
  }

  std::shared_ptr<const Node> node_;
};

/// Linear numeric condition `lhs <comparator> rhs`.
struct Inequality {
  Expr lhs;
  Comparator comparator = Comparator::less;
  Expr rhs;

  std::set<std::string> variables() const {
    std::set<std::string> out;
    lhs.collect_variables(out);
    rhs.collect_variables(out);
    return out;
  }

  template <typename Lookup>
  bool holds(const Lookup& lookup) const {
    return compare(lhs.evaluate(lookup), comparator, rhs.evaluate(lookup));
  }

  template <typename Rename>
  Inequality rename(const Rename& f) const {
    return {lhs.rename(f), comparator, rhs.rename(f)};
  }

  std::string to_string() const {
    return lhs.to_string() + " " + std::string(scenario::to_string(comparator)) + " " + rhs.to_string();
  }

  bool operator==(const Inequality&) const = default;
};

namespace detail {

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) { tokenize(); }

  Inequality inequality() {
    Expr lhs = sum();
    if (peek().kind != Token::comparator) fail("expected a comparator", peek());
    Comparator c{};
    parse_comparator(peek().text, c);
    ++pos_;
    Expr rhs = sum();
    if (peek().kind != Token::end) fail("unexpected '" + std::string(peek().text) + "'", peek());
    Inequality result{std::move(lhs), c, std::move(rhs)};
    if (result.lhs.degree() > 1 || result.rhs.degree() > 1) fail("expression is not linear", tokens_.front());
    if (result.variables().empty()) fail("condition references no parameter", tokens_.front());
    return result;
  }

  Expr expression() {
    Expr e = sum();
    if (peek().kind != Token::end) fail("unexpected '" + std::string(peek().text) + "'", peek());
    return e;
  }

 private:
  struct Token {
    enum Kind { number, name, op, lparen, rparen, comparator, end } kind;
    std::string_view text;
    std::size_t offset;
  };

  [[noreturn]] void fail(const std::string& message, const Token& at) const {
    throw Error(ErrorCode::SyntaxError, message + " in '" + std::string(text_) + "'", 0, at.offset + 1);
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  void tokenize() {
    std::size_t i = 0;
    const std::string_view s = text_;
    while (i < s.size()) {
      const char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      const std::size_t start = i;
      if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
        if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
          std::size_t j = i + 1;
          if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
          if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
            i = j;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
          }
        }
        tokens_.push_back({Token::number, s.substr(start, i - start), start});
      } else if (ident_start(c)) {
        while (true) {
          while (i < s.size() && ident_char(s[i])) ++i;
          if (i + 1 < s.size() && s[i] == '.' && ident_start(s[i + 1])) {
            ++i;
            continue;
          }
          break;
        }
        tokens_.push_back({Token::name, s.substr(start, i - start), start});
      } else if (c == '+' || c == '-' || c == '*') {
        tokens_.push_back({Token::op, s.substr(i++, 1), start});
      } else if (c == '(') {
        tokens_.push_back({Token::lparen, s.substr(i++, 1), start});
      } else if (c == ')') {
        tokens_.push_back({Token::rparen, s.substr(i++, 1), start});
      } else if (c == '<' || c == '>') {
        i += (i + 1 < s.size() && s[i + 1] == '=') ? 2 : 1;
        tokens_.push_back({Token::comparator, s.substr(start, i - start), start});
      } else if (c == '=') {
        tokens_.push_back({Token::comparator, s.substr(i++, 1), start});
      } else if (s.substr(i, 3) == "≤" || s.substr(i, 3) == "≥") {
        tokens_.push_back({Token::comparator, s.substr(i, 3), start});
        i += 3;
      } else {
        fail("unexpected character '" + std::string(1, c) + "'", Token{Token::end, {}, start});
      }
    }
    tokens_.push_back({Token::end, {}, s.size()});
  }

  const Token& peek() const { return tokens_[pos_]; }

  Expr sum() {
    Expr e = product();
    while (peek().kind == Token::op && (peek().text == "+" || peek().text == "-")) {
      const Expr::Op op = peek().text == "+" ? Expr::Op::add : Expr::Op::subtract;
      ++pos_;
      e = Expr::binary(op, std::move(e), product());
    }
    return e;
  }

  Expr product() {
    Expr e = unary();
    while (peek().kind == Token::op && peek().text == "*") {
      ++pos_;
      e = Expr::binary(Expr::Op::multiply, std::move(e), unary());
    }
    return e;
  }

  Expr unary() {
    if (peek().kind == Token::op && peek().text == "-") {
      ++pos_;
      if (peek().kind == Token::number) return Expr::number(-number(tokens_[pos_++]));
      return Expr::negate(unary());
    }
    return primary();
  }

  double number(const Token& t) const {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || ptr != t.text.data() + t.text.size() || !std::isfinite(v))
      fail("malformed number '" + std::string(t.text) + "'", t);
    return v;
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::number:
        ++pos_;
        return Expr::number(number(t));
      case Token::name:
        ++pos_;
        return Expr::variable(std::string(t.text));
      case Token::lparen: {
        ++pos_;
        Expr e = sum();
        if (peek().kind != Token::rparen) fail("expected ')'", peek());
        ++pos_;
        return e;
      }
      case Token::end:
        fail("unexpected end of expression", t);
      default:
        fail("unexpected '" + std::string(t.text) + "'", t);
    }
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Inequality parse_inequality(std::string_view text) { return detail::ExpressionParser(text).inequality(); }
inline Expr parse_expression(std::string_view text) { return detail::ExpressionParser(text).expression(); }

}  // namespace scenario
