#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "phrase.hpp"

namespace octode {

/// Truncated Taylor series in real variables (t, x1, x2) with Cayley-Dickson coefficients,
/// total degree <= order.  nvars counts t plus the spatial variables (1..3).
class MSeries {
 public:
  MSeries() = default;
  MSeries(int nvars, int order, int level) : nvars_(nvars), order_(order), level_(level) {
    if (nvars < 1 || nvars > 3) throw Error(ErrorCode::InvalidArgument, "1 to 3 series variables");
    c_.assign(size(), CdNum(level));
  }

  static MSeries constant(const CdNum& a, int nvars, int order) {
    MSeries s(nvars, order, a.level());
    s.c_[0] = a;
    return s;
  }
  /// The series of (var k) shifted by `at`, i.e. at + (v_k - v_k0).
  static MSeries variable(int k, double at, int nvars, int order, int level) {
    MSeries s(nvars, order, level);
    s.c_[0] = CdNum(level, at);
    if (order >= 1) {
      std::array<int, 3> e{0, 0, 0};
      e[k] = 1;
      s.at(e) = CdNum(level, 1.0);
    }
    return s;
  }

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  int level() const { return level_; }

  CdNum& at(const std::array<int, 3>& e) { return c_[index(e)]; }
  const CdNum& at(const std::array<int, 3>& e) const { return c_[index(e)]; }
  CdNum coeff(int a, int b1 = 0, int b2 = 0) const {
    if (a + b1 + b2 > order_) return CdNum(level_);
    return at({a, b1, b2});
  }

  /// Visits multi-indices with total degree <= order (t-degree outermost).
  template <class F>
  void for_each(F&& f) const {
    const int n1 = nvars_ > 1 ? order_ : 0;
    const int n2 = nvars_ > 2 ? order_ : 0;
    for (int a = 0; a <= order_; ++a)
      for (int b1 = 0; b1 <= n1 && a + b1 <= order_; ++b1)
        for (int b2 = 0; b2 <= n2 && a + b1 + b2 <= order_; ++b2) f(std::array<int, 3>{a, b1, b2});
  }

  MSeries& operator+=(const MSeries& o) {
    promote_to(o.level_);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  MSeries& operator-=(const MSeries& o) {
    promote_to(o.level_);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  MSeries& operator*=(double s) {
    for (auto& a : c_) a *= s;
    return *this;
  }

  /// Cauchy product; coefficient order a_i * b_j is kept.
  friend MSeries operator*(const MSeries& x, const MSeries& y) {
    MSeries out(x.nvars_, x.order_, std::max(x.level_, y.level_));
    x.for_each([&](const std::array<int, 3>& i) {
      const CdNum& xi = x.at(i);
      if (xi.norm() == 0.0) return;
      y.for_each([&](const std::array<int, 3>& j) {
        const std::array<int, 3> k{i[0] + j[0], i[1] + j[1], i[2] + j[2]};
        if (k[0] + k[1] + k[2] > out.order_) return;
        out.at(k) += xi * y.at(j);
      });
    });
    return out;
  }
  friend MSeries operator*(const CdNum& a, const MSeries& y) { return constant(a, y.nvars_, y.order_) * y; }
  friend MSeries operator*(const MSeries& y, const CdNum& a) { return y * constant(a, y.nvars_, y.order_); }
  friend MSeries operator+(MSeries a, const MSeries& b) { return a += b; }
  friend MSeries operator-(MSeries a, const MSeries& b) { return a -= b; }
  friend MSeries operator*(MSeries a, double s) { return a *= s; }
  friend MSeries operator*(double s, MSeries a) { return a *= s; }

  MSeries conj() const {
    MSeries s = *this;
    for (auto& a : s.c_) a = cd_conj(a);
    return s;
  }

  /// Partial derivative in variable k; the top degree is lost.
  MSeries derivative(int k) const {
    MSeries s(nvars_, order_, level_);
    for_each([&](const std::array<int, 3>& e) {
      if (e[k] == 0) return;
      std::array<int, 3> d = e;
      d[k] -= 1;
      s.at(d) = at(e) * static_cast<double>(e[k]);
    });
    return s;
  }

  /// Value at offsets (dt, dx1, dx2) from the expansion point.
  CdNum operator()(const std::array<double, 3>& d) const {
    CdNum acc(level_);
    for_each([&](const std::array<int, 3>& e) {
      double m = 1.0;
      for (int k = 0; k < 3; ++k) m *= std::pow(d[k], e[k]);
      acc += at(e) * m;
    });
    return acc;
  }

  /// Largest coefficient norm with t-degree a.
  double layer_norm(int a) const {
    double m = 0.0;
    for_each([&](const std::array<int, 3>& e) {
      if (e[0] == a) m = std::max(m, at(e).norm());
    });
    return m;
  }

  void promote_to(int level) {
    if (level <= level_) return;
    for (auto& a : c_) a = a.promoted(level);
    level_ = level;
  }

 private:
  size_t size() const {
    size_t s = 1;
    for (int k = 0; k < nvars_; ++k) s *= order_ + 1;
    return s;
  }
  size_t index(const std::array<int, 3>& e) const {
    const size_t n = order_ + 1;
    return e[0] + n * (nvars_ > 1 ? e[1] : 0) + n * n * (nvars_ > 2 ? e[2] : 0);
  }

  int nvars_ = 1, order_ = 0, level_ = 0;
  std::vector<CdNum> c_;
};

namespace detail {
inline MSeries series_node(const NodePtr& t, const MSeries& x, const MSeries& xc) {
  switch (t->kind) {
    case Node::Kind::Const: return MSeries::constant(t->value.promoted(std::max(t->value.level(), x.level())), x.nvars(), x.order());
    case Node::Kind::Var: return x;
    case Node::Kind::ConjVar: return xc;
    case Node::Kind::Mul: return series_node(t->left, x, xc) * series_node(t->right, x, xc);
    case Node::Kind::Slot: break;
  }
  throw Error(ErrorCode::NonAnalyticInput, "slot leaf in a series substitution");
}
}  // namespace detail

/// p(u) for a series u.
inline MSeries compose(const Phrase& p, const MSeries& u) {
  MSeries x = u;
  x.promote_to(p.level());
  const MSeries xc = x.conj();
  MSeries out(x.nvars(), x.order(), x.level());
  for (const auto& m : p.terms()) out += detail::series_node(m.tree, x, xc) * m.scale;
  return out;
}

/// Arguments handed to a right-hand side: t, spatial variables, unknowns and their spatial derivatives.
struct SeriesArgs {
  MSeries t;
  std::vector<MSeries> x;
  std::vector<MSeries> u;
  std::vector<std::vector<MSeries>> ux;  // ux[j][k] = d u_j / d x_k
};

using SeriesRhs = std::function<MSeries(const SeriesArgs&)>;
/// Boundary function phi_j(x) at t = t0, as a series in the spatial offsets.
using SeriesInitial = std::function<MSeries(const std::vector<MSeries>& x)>;

/// du_j/dt = F_j(t, x, u, du/dx), u_j(t0, x) = phi_j(x).
struct CauchyProblem {
  int unknowns = 1;
  int spatial = 0;  // 0..2
  int level = 2;
  std::vector<SeriesRhs> rhs;
  std::vector<SeriesInitial> initial;
  double t0 = 0.0;
  std::array<double, 2> x0{0.0, 0.0};
};

enum class SeriesOrdering { Forward, Reverse };

struct SeriesSolution {
  std::vector<MSeries> u;
  double radius = 0.0;
  double residual_max = 0.0;
  std::vector<std::array<double, 3>> residual_points;
  std::string note;

  CdNum operator()(int j, double t, double x1 = 0.0, double x2 = 0.0) const { return u[j]({t, x1, x2}); }
};

namespace detail {

inline SeriesArgs series_args(const CauchyProblem& p, const std::vector<MSeries>& u, int order) {
  const int nv = 1 + p.spatial;
  SeriesArgs a;
  a.t = MSeries::variable(0, p.t0, nv, order, p.level);
  for (int k = 0; k < p.spatial; ++k) a.x.push_back(MSeries::variable(k + 1, p.x0[k], nv, order, p.level));
  a.u = u;
  for (const auto& uj : u) {
    std::vector<MSeries> d;
    for (int k = 0; k < p.spatial; ++k) d.push_back(uj.derivative(k + 1));
    a.ux.push_back(d);
  }
  return a;
}

/// Pointwise arguments as order-0 series.
inline SeriesArgs point_args(const CauchyProblem& p, const std::vector<MSeries>& u, const std::array<double, 3>& d) {
  const int nv = 1 + p.spatial;
  SeriesArgs a;
  a.t = MSeries::constant(CdNum(p.level, p.t0 + d[0]), nv, 0);
  for (int k = 0; k < p.spatial; ++k) a.x.push_back(MSeries::constant(CdNum(p.level, p.x0[k] + d[k + 1]), nv, 0));
  for (const auto& uj : u) {
    a.u.push_back(MSeries::constant(uj(d), nv, 0));
    std::vector<MSeries> dv;
    for (int k = 0; k < p.spatial; ++k) dv.push_back(MSeries::constant(uj.derivative(k + 1)(d), nv, 0));
    a.ux.push_back(dv);
  }
  return a;
}

/// Root-test radius from the last t-layers: min_k |c_k|^(-1/k).
inline double radius_estimate(const std::vector<MSeries>& u) {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& s : u) {
    const int n = s.order();
    for (int k = std::max(1, n - 3); k <= n; ++k) {
      const double c = s.layer_norm(k);
      if (c > 0) r = std::min(r, std::pow(c, -1.0 / k));
    }
  }
  return r;
}

}  // namespace detail

/// Coefficients by increasing t-degree: layer a + 1 of u_j is layer a of F_j divided by a + 1.
inline SeriesSolution cauchy_series_solve(const CauchyProblem& p, int order,
                                          SeriesOrdering ordering = SeriesOrdering::Forward) {
  if (static_cast<int>(p.rhs.size()) != p.unknowns || static_cast<int>(p.initial.size()) != p.unknowns)
    throw Error(ErrorCode::ShapeMismatch, "one rhs and one initial function per unknown");
  const int nv = 1 + p.spatial;
  std::vector<MSeries> xs;
  for (int k = 0; k < p.spatial; ++k) xs.push_back(MSeries::variable(k + 1, p.x0[k], nv, order, p.level));

  // t-degree zero layer is phi_j (the shift w_j = u_j - phi_j leaves zero data)
  std::vector<MSeries> u;
  for (int j = 0; j < p.unknowns; ++j) {
    MSeries phi = p.initial[j](xs);
    MSeries s(nv, order, std::max(p.level, phi.level()));
    phi.for_each([&](const std::array<int, 3>& e) {
      if (e[0] == 0) s.at(e) = phi.at(e).promoted(s.level());
    });
    u.push_back(s);
  }

  std::vector<int> idx(p.unknowns);
  for (int j = 0; j < p.unknowns; ++j) idx[j] = ordering == SeriesOrdering::Forward ? j : p.unknowns - 1 - j;

  double prev = 0.0;
  for (int a = 0; a < order; ++a) {
    const SeriesArgs args = detail::series_args(p, u, order);
    std::vector<MSeries> F(p.unknowns);
    for (int j : idx) {
      try {
        F[j] = p.rhs[j](args);
      } catch (const Error& e) {
        throw Error(ErrorCode::NonAnalyticInput, std::string("rhs failed: ") + e.what());
      }
    }
    auto fill = [&](const std::array<int, 3>& e) {
      if (e[0] != a || e[0] + 1 + e[1] + e[2] > order) return;
      for (int j : idx) {
        const CdNum c = F[j].at(e) / (a + 1.0);
        if (!std::isfinite(c.norm())) throw Error(ErrorCode::NonAnalyticInput, "non-finite coefficient");
        u[j].promote_to(c.level());
        u[j].at({a + 1, e[1], e[2]}) = c.promoted(u[j].level());
      }
    };
    if (ordering == SeriesOrdering::Forward) {
      u[0].for_each(fill);
    } else {
      std::vector<std::array<int, 3>> es;
      u[0].for_each([&](const std::array<int, 3>& e) { es.push_back(e); });
      for (auto it = es.rbegin(); it != es.rend(); ++it) fill(*it);
    }
    double layer = 0.0;
    for (const auto& s : u) layer = std::max(layer, s.layer_norm(a + 1));
    if (layer > 1e150 || (a >= 3 && prev > 0 && layer > 1e6 * (a + 1) * prev))
      throw Error(ErrorCode::RecursionBlowup, "coefficients grow super-geometrically at degree " + std::to_string(a + 1));
    prev = layer;
  }

  SeriesSolution sol;
  sol.u = u;
  sol.radius = detail::radius_estimate(u);
  // residual du/dt - F at a few points inside half the radius
  const double reach = std::min(0.5 * sol.radius, 0.5);
  for (int i = 1; i <= 6; ++i) {
    const double s = reach * i / 7.0;
    sol.residual_points.push_back({s, p.spatial > 0 ? 0.5 * s : 0.0, p.spatial > 1 ? -0.5 * s : 0.0});
  }
  for (const auto& d : sol.residual_points) {
    const SeriesArgs pa = detail::point_args(p, u, d);
    for (int j = 0; j < p.unknowns; ++j) {
      const CdNum lhs = u[j].derivative(0)(d);
      const CdNum rhs = p.rhs[j](pa).coeff(0);
      sol.residual_max = std::max(sol.residual_max, (lhs - rhs).norm());
    }
  }
  sol.note = "root-test radius over the last four t-layers";
  return sol;
}

/// d^{n_j} u_j / dt^{n_j} = F_j(t, x, v) with v listing v_{j,p} = d^p u_j/dt^p for p < n_j, unknown by unknown.
struct HighOrderSystem {
  std::vector<int> orders;
  int spatial = 0;
  int level = 2;
  std::vector<SeriesRhs> rhs;                     // sees args.u = all v_{j,p}
  std::vector<std::vector<SeriesInitial>> initial;  // initial[j][p] = d^p u_j/dt^p at t0
  double t0 = 0.0;
  std::array<double, 2> x0{0.0, 0.0};
};

/// Adds v_{j,p} unknowns with closures dv_{j,p}/dt = v_{j,p+1}; the last one carries F_j.
inline CauchyProblem reduce_to_first_order(const HighOrderSystem& h) {
  CauchyProblem p;
  p.spatial = h.spatial;
  p.level = h.level;
  p.t0 = h.t0;
  p.x0 = h.x0;
  int offset = 0;
  for (size_t j = 0; j < h.orders.size(); ++j) {
    const int n = h.orders[j];
    if (n < 1) throw Error(ErrorCode::ShapeMismatch, "orders must be >= 1");
    for (int q = 0; q < n; ++q) {
      const int me = offset + q;
      if (q + 1 < n)
        p.rhs.push_back([me](const SeriesArgs& a) { return a.u[me + 1]; });
      else
        p.rhs.push_back(h.rhs[j]);
      p.initial.push_back(h.initial[j][q]);
    }
    offset += n;
  }
  p.unknowns = offset;
  return p;
}

}  // namespace octode
