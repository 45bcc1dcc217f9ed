#pragma once

// Arithmetic expressions in one real variable g.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | 'g' | '(' expr ')'
//
// So -g^2 is -(g^2) and 2^-1 is 0.5.

#include "mpsbell/errors.hpp"

#include <charconv>
#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace mpsbell {

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind { number, variable, negate, add, subtract, multiply, divide, power };
  Kind kind = Kind::number;
  double value = 0.0;
  Expr lhs;
  Expr rhs;
};

namespace detail {

class ExprParser {
public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  Expr parse() {
    skip_space();
    if (pos_ == text_.size()) fail({"number", "g", "(", "-"}, "empty expression");
    Expr e = expr();
    skip_space();
    if (pos_ != text_.size()) fail({"+", "-", "*", "/", "^", "end of input"}, "unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(std::vector<std::string> expected, const std::string &what, std::size_t at) const {
    std::string list;
    for (std::size_t i = 0; i < expected.size(); ++i) list += (i ? ", " : "") + expected[i];
    throw ParseError(at, std::move(expected), "offset " + std::to_string(at) + ": " + what + " (expected " + list + ")");
  }
  [[noreturn]] void fail(std::vector<std::string> expected, const std::string &what) const {
    fail(std::move(expected), what, pos_);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static Expr make(ExprNode::Kind kind, Expr lhs, Expr rhs = nullptr) {
    auto node = std::make_shared<ExprNode>();
    node->kind = kind;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return node;
  }

  /// Operand after a binary operator at op_at; a missing one is reported at the operator.
  Expr operand(Expr (ExprParser::*rule)(), std::size_t op_at) {
    skip_space();
    if (pos_ == text_.size()) fail({"number", "g", "(", "-"}, "missing operand after '" + std::string(1, text_[op_at]) + "'", op_at);
    return (this->*rule)();
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('+')) lhs = make(ExprNode::Kind::add, lhs, operand(&ExprParser::term, at));
      else if (accept('-')) lhs = make(ExprNode::Kind::subtract, lhs, operand(&ExprParser::term, at));
      else return lhs;
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('*')) lhs = make(ExprNode::Kind::multiply, lhs, operand(&ExprParser::unary, at));
      else if (accept('/')) lhs = make(ExprNode::Kind::divide, lhs, operand(&ExprParser::unary, at));
      else return lhs;
    }
  }

  Expr unary() {
    skip_space();
    const std::size_t at = pos_;
    if (accept('-')) return make(ExprNode::Kind::negate, operand(&ExprParser::unary, at));
    return power();
  }

  Expr power() {
    Expr base = primary();
    skip_space();
    const std::size_t at = pos_;
    if (accept('^')) return make(ExprNode::Kind::power, base, operand(&ExprParser::unary, at));
    return base;
  }

  Expr primary() {
    skip_space();
    if (pos_ == text_.size()) fail({"number", "g", "(", "-"}, "unexpected end of input");
    const char c = text_[pos_];
    if (c == 'g') {
      ++pos_;
      auto node = std::make_shared<ExprNode>();
      node->kind = ExprNode::Kind::variable;
      return node;
    }
    if (c == '(') {
      const std::size_t open = pos_++;
      skip_space();
      if (pos_ == text_.size()) fail({"number", "g", "(", "-"}, "missing expression after '('", open);
      Expr inner = expr();
      if (!accept(')')) fail({")"}, "unbalanced '(' opened at offset " + std::to_string(open));
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    fail({"number", "g", "(", "-"}, "unexpected '" + std::string(1, c) + "'");
  }

  /// digits [. digits] [(e|E) [+|-] digits]
  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t from = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return pos_ - from;
    };
    std::size_t count = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) fail({"digit"}, "malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail({"digit"}, "malformed exponent");
    }
    double value = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || !std::isfinite(value)) fail({"finite number"}, "number out of range", start);
    auto node = std::make_shared<ExprNode>();
    node->kind = ExprNode::Kind::number;
    node->value = value;
    return node;
  }
};

} // namespace detail

inline Expr parse_expr(std::string_view text) { return detail::ExprParser(text).parse(); }

/// IEEE evaluation with 0^0 = 1; division by zero and non-finite results throw EvalError.
inline double eval_expr(const Expr &e, double g) {
  using K = ExprNode::Kind;
  double out = 0.0;
  switch (e->kind) {
  case K::number: out = e->value; break;
  case K::variable: out = g; break;
  case K::negate: out = -eval_expr(e->lhs, g); break;
  case K::add: out = eval_expr(e->lhs, g) + eval_expr(e->rhs, g); break;
  case K::subtract: out = eval_expr(e->lhs, g) - eval_expr(e->rhs, g); break;
  case K::multiply: out = eval_expr(e->lhs, g) * eval_expr(e->rhs, g); break;
  case K::divide: {
    const double num = eval_expr(e->lhs, g);
    const double den = eval_expr(e->rhs, g);
    if (den == 0.0) throw EvalError("division by zero at g = " + std::to_string(g));
    out = num / den;
    break;
  }
  case K::power: {
    const double base = eval_expr(e->lhs, g);
    const double exponent = eval_expr(e->rhs, g);
    out = (base == 0.0 && exponent == 0.0) ? 1.0 : std::pow(base, exponent);
    break;
  }
  }
  if (!std::isfinite(out)) throw EvalError("non-finite result at g = " + std::to_string(g));
  return out;
}

/// Fully parenthesized canonical form; parse(print(e)) is structurally equal to e.
inline std::string print_expr(const Expr &e) {
  using K = ExprNode::Kind;
  switch (e->kind) {
  case K::number: {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, e->value);
    return std::string(buf, res.ptr);
  }
  case K::variable: return "g";
  case K::negate: return "(-" + print_expr(e->lhs) + ")";
  default: break;
  }
  const char *op = e->kind == K::add ? "+" : e->kind == K::subtract ? "-" : e->kind == K::multiply ? "*"
                   : e->kind == K::divide ? "/" : "^";
  return "(" + print_expr(e->lhs) + op + print_expr(e->rhs) + ")";
}

inline bool expr_equal(const Expr &a, const Expr &b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  if (a->kind == ExprNode::Kind::number) return a->value == b->value;
  return expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
}

} // namespace mpsbell
