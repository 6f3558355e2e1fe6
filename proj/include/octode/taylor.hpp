#pragma once

#include <vector>

#include "phrase.hpp"

namespace octode {

/// Truncated power series in one real variable with Cayley-Dickson coefficients.
struct Taylor {
  std::vector<CdNum> c;

  static Taylor constant(const CdNum& a, int order) {
    Taylor t;
    t.c.assign(order + 1, CdNum(a.level()));
    t.c[0] = a;
    return t;
  }

  int order() const { return static_cast<int>(c.size()) - 1; }

  CdNum operator()(double s) const {
    CdNum acc = c.back();
    for (int k = order() - 1; k >= 0; --k) acc = acc * s + c[k];
    return acc;
  }

  Taylor& operator+=(const Taylor& o) {
    for (size_t k = 0; k < c.size(); ++k) c[k] += o.c[k];
    return *this;
  }
  Taylor& operator*=(double s) {
    for (auto& a : c) a *= s;
    return *this;
  }

  /// Cauchy product, operand order preserved in every coefficient.
  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    const int n = a.order();
    Taylor out;
    out.c.assign(n + 1, CdNum(std::max(a.c[0].level(), b.c[0].level())));
    for (int i = 0; i <= n; ++i)
      for (int j = 0; i + j <= n; ++j) out.c[i + j] += a.c[i] * b.c[j];
    return out;
  }

  Taylor conj() const {
    Taylor t = *this;
    for (auto& a : t.c) a = cd_conj(a);
    return t;
  }
};

namespace detail {
inline Taylor taylor_node(const NodePtr& t, const Taylor& x, const Taylor& xc, int level) {
  switch (t->kind) {
    case Node::Kind::Const: return Taylor::constant(t->value.promoted(std::max(level, t->value.level())), x.order());
    case Node::Kind::Var: return x;
    case Node::Kind::ConjVar: return xc;
    case Node::Kind::Mul: return taylor_node(t->left, x, xc, level) * taylor_node(t->right, x, xc, level);
    case Node::Kind::Slot: break;
  }
  throw Error(ErrorCode::InvalidArgument, "slot leaf in a series substitution");
}
}  // namespace detail

/// p(x(s)) as a series when x(s) is a series.
inline Taylor compose(const Phrase& p, const Taylor& x) {
  const int level = std::max(x.c[0].level(), p.level());
  Taylor xs = x;
  for (auto& a : xs.c) a = a.promoted(level);
  const Taylor xc = xs.conj();
  Taylor out = Taylor::constant(CdNum(level), x.order());
  for (const auto& m : p.terms()) {
    Taylor t = detail::taylor_node(m.tree, xs, xc, level);
    t *= m.scale;
    out += t;
  }
  return out;
}

}  // namespace octode
