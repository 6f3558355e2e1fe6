#pragma once

#include <cctype>
#include <cstdlib>
#include <string>
#include <string_view>

#include "phrase.hpp"

namespace octode {

namespace detail {

inline int level_for_index(int k) {
  int r = 0;
  while (dim_of(r) <= k) ++r;
  return r;
}

inline int level_for_count(size_t n, size_t pos) {
  for (int r = 0; r <= kMaxLevel; ++r)
    if (static_cast<size_t>(dim_of(r)) == n) return r;
  throw Error(ErrorCode::SyntaxError, "tuple length must be a power of two up to 16 at position " +
                                          std::to_string(pos));
}

/// Recursive-descent parser for the phrase grammar.
class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : s_(text) {}

  Phrase parse() {
    Phrase p = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::SyntaxError, msg + " at position " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  bool number_ahead() {
    skip_ws();
    size_t p = pos_;
    if (p < s_.size() && (s_[p] == '-' || s_[p] == '+')) ++p;
    return p < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[p])) || s_[p] == '.');
  }

  double real_literal() {
    skip_ws();
    const std::string tail(s_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(tail.c_str(), &end);
    if (end == tail.c_str()) fail("expected a number");
    pos_ += static_cast<size_t>(end - tail.c_str());
    return v;
  }

  int int_literal() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    return std::stoi(std::string(s_.substr(start, pos_ - start)));
  }

  std::string ident() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  Phrase expr() {
    const bool neg = accept('-');
    Phrase p = term();
    if (neg) p *= -1.0;
    for (;;) {
      if (accept('+')) {
        p += term();
      } else if (accept('-')) {
        p -= term();
      } else {
        return p;
      }
    }
  }

  Phrase term() {
    Phrase p = factor();
    while (accept('*')) p = p * factor();
    return p;
  }

  Phrase factor() {
    Phrase a = atom();
    if (accept('^')) a = a.pow(int_literal());
    return a;
  }

  Phrase atom() {
    const char c = peek();
    if (c == '(') {
      const size_t save = pos_;
      ++pos_;
      if (number_ahead()) {
        real_literal();
        const bool is_tuple = peek() == ',';
        pos_ = save;
        if (is_tuple) return tuple();
      } else {
        pos_ = save;
      }
      expect('(');
      Phrase p = expr();
      expect(')');
      return p;
    }
    if (number_ahead()) return Phrase::real(real_literal());
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const size_t at = pos_;
      const std::string id = ident();
      if (id == "z") return Phrase::var();
      if (id == "conj") {
        expect('(');
        Phrase p = expr();
        expect(')');
        return p.conj();
      }
      if (id == "e" && pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        const int k = int_literal();
        if (k >= kMaxDim) fail("basis index above 15");
        return Phrase::constant(CdNum::basis(level_for_index(k), k));
      }
      pos_ = at;
      throw Error(ErrorCode::UnknownSymbol, "unknown symbol '" + id + "' at position " + std::to_string(at));
    }
    fail(c == '\0' ? "unexpected end of input" : std::string("unexpected '") + c + "'");
  }

  Phrase tuple() {
    const size_t at = pos_;
    expect('(');
    std::vector<double> v{real_literal()};
    while (accept(',')) v.push_back(real_literal());
    expect(')');
    return Phrase::constant(CdNum(level_for_count(v.size(), at), v));
  }

  std::string_view s_;
  size_t pos_ = 0;
};

inline std::string short_double(double v) {
  std::string s = format_double(v, 15);
  if (std::strtod(s.c_str(), nullptr) != v) s = format_double(v, 17);
  return s;
}

inline std::string print_const(const CdNum& c) {
  for (int k = 0; k < c.dim(); ++k) {
    if (c[k] != 1.0) continue;
    CdNum rest = c - CdNum::basis(c.level(), k);
    if (rest.norm() == 0.0) return k == 0 ? "1" : "e" + std::to_string(k);
  }
  std::string s = "(";
  for (int k = 0; k < c.dim(); ++k) {
    if (k) s += ",";
    s += short_double(c[k]);
  }
  return s + ")";
}

inline std::string print_node(const NodePtr& t) {
  switch (t->kind) {
    case Node::Kind::Const: return print_const(t->value);
    case Node::Kind::Var: return "z";
    case Node::Kind::ConjVar: return "conj(z)";
    case Node::Kind::Slot: {
      const std::string h = "h" + std::to_string(t->slot + 1);
      return t->slot_conj ? "conj(" + h + ")" : h;
    }
    case Node::Kind::Mul: {
      std::string r = print_node(t->right);
      if (t->right->kind == Node::Kind::Mul) r = "(" + r + ")";
      return print_node(t->left) + "*" + r;
    }
  }
  return {};
}

}  // namespace detail

inline Phrase parse_expression(std::string_view text) { return detail::ExprParser(text).parse(); }

/// Printed form parses back to the same trees and scales.
inline std::string print_phrase(const Phrase& p) {
  if (p.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& m : p.terms()) {
    double sc = m.scale;
    if (first) {
      if (sc < 0) s += "-";
    } else {
      s += sc < 0 ? " - " : " + ";
    }
    sc = std::abs(sc);
    const bool unit_tree = m.tree->kind == Node::Kind::Const && m.tree->value.im().norm() == 0.0 &&
                           m.tree->value.re() == 1.0;
    if (unit_tree) {
      s += detail::short_double(sc);
    } else if (sc == 1.0) {
      s += detail::print_node(m.tree);
    } else {
      s += detail::short_double(sc) + "*" + detail::print_node(m.tree);
    }
    first = false;
  }
  return s;
}

/// Accepts "a0 + a1*e1 + ..." or "(a0,a1,...)"; the result is promoted to at least min_level.
inline CdNum parse_cdnum(std::string_view text, int min_level = 0) {
  const Phrase p = parse_expression(text);
  for (const auto& m : p.terms()) {
    const int vars = node::count_if(m.tree, [](const Node& n) {
      return n.kind == Node::Kind::Var || n.kind == Node::Kind::ConjVar;
    });
    if (vars) throw Error(ErrorCode::SyntaxError, "number literal must not contain z");
  }
  const int r = std::max(min_level, p.level());
  return p.eval(CdNum(r));
}

}  // namespace octode
