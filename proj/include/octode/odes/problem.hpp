#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "../func.hpp"
#include "../newton.hpp"

namespace octode {

namespace tol {
inline constexpr double kClosedForm = 1e-8;
inline constexpr double kQuadrature = 1e-7;
inline constexpr double kNewton = 1e-6;
}  // namespace tol

/// Cauchy data on the hyperplane Re x = alpha0; eta is evaluated at Im x.
struct BoundaryData {
  double alpha0 = 0.0;
  Func eta = Func::constant(CdNum(0, 0.0));

  CdNum at(const CdNum& x_imag) const { return eta(x_imag); }
};

inline BoundaryData boundary(double alpha0, const Func& eta) { return {alpha0, eta}; }
inline BoundaryData boundary(double alpha0, double c) { return {alpha0, Func::constant(CdNum(0, c))}; }

/// Sample region. plane < 0: every imaginary component; plane = j > 0: only e_j; plane = 0: real axis.
struct GridSpec {
  int level = 2;
  int points = 50;
  int seed = 0;
  double center_re = std::numeric_limits<double>::quiet_NaN();  // NaN: alpha0 of the problem; Re lies in [center_re + margin, center_re + margin + span]
  double margin = 0.05;
  double span = 1.0;
  double radius = 0.3;
  int plane = -1;
  CdNum offset;  // added to every point (used for parameter grids)
};

namespace detail {
inline double radical_inverse(int i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}
inline constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
}  // namespace detail

/// Halton points, index seed+1 onwards.
inline std::vector<CdNum> make_grid(const GridSpec& g) {
  std::vector<CdNum> pts;
  const int n = dim_of(g.level);
  for (int i = 0; i < g.points; ++i) {
    const int idx = g.seed + i + 1;
    CdNum x(g.level);
    x.set(0, (std::isnan(g.center_re) ? 0.0 : g.center_re) + g.margin + g.span * detail::radical_inverse(idx, 2));
    for (int k = 1; k < n; ++k) {
      if (g.plane == 0 || (g.plane > 0 && k != g.plane)) continue;
      x.set(k, g.radius * (2 * detail::radical_inverse(idx, detail::kPrimes[k]) - 1));
    }
    pts.push_back(g.offset.norm() > 0 ? x + g.offset : x);
  }
  return pts;
}

struct ResidualReport {
  std::vector<CdNum> points;
  std::vector<double> residuals;
  double max = 0.0;
  double mean = 0.0;
  std::vector<std::string> failures;  // points where evaluation threw

  void add(const CdNum& x, double r) {
    points.push_back(x);
    residuals.push_back(r);
  }
  void finish() {
    max = 0.0;
    mean = 0.0;
    for (double r : residuals) {
      max = std::max(max, r);
      mean += r;
    }
    if (!residuals.empty()) mean /= residuals.size();
    if (!failures.empty()) max = std::numeric_limits<double>::infinity();
  }
};

/// Runs pointwise residual evaluation, collecting failures instead of throwing.
inline ResidualReport residual_over(const std::vector<CdNum>& pts, const std::function<double(const CdNum&)>& res) {
  ResidualReport rep;
  for (const auto& x : pts) {
    try {
      const double r = res(x);
      if (!std::isfinite(r)) throw Error(ErrorCode::NonFinite, "residual not finite");
      rep.add(x, r);
    } catch (const std::exception& e) {
      rep.failures.push_back(to_string(x) + ": " + e.what());
    }
  }
  rep.finish();
  return rep;
}

struct Solution {
  enum class Repr { ClosedForm, Series, GridBacked, Parametric };
  Repr repr = Repr::GridBacked;
  std::string printable = "grid-backed";
  ScalarMap y;                 // explicit solutions
  ScalarMap x_of_p, y_of_p;    // parametric solutions
  std::vector<std::string> branch_notes;
  double tolerance = tol::kQuadrature;
  ResidualReport residual;
  bool verified = false;

  CdNum operator()(const CdNum& x) const { return y(x); }
  bool parametric() const { return repr == Repr::Parametric; }
};

// ---- finite-difference residual helpers ----

/// Five-point central difference of y along h at x; displacement step * max(1,|x|).
inline CdNum directional(const ScalarMap& y, const CdNum& x, const CdNum& h, double step = 1e-3) {
  const double hn = h.norm();
  if (hn == 0.0) return CdNum(std::max(x.level(), h.level()));
  const double e = step * std::max(1.0, x.norm()) / hn;
  const CdNum d = h * e;
  return (y(x + d * 2.0) * -1.0 + y(x + d) * 8.0 - y(x - d) * 8.0 + y(x - d * 2.0)) / (12 * e);
}

/// y, [dy/dx].h and [d2y/dx2].(h, h) for constant h from one five-point stencil.
inline std::array<CdNum, 3> jet2(const ScalarMap& y, const CdNum& x, const CdNum& h, double step = 4e-3) {
  const double e = step * std::max(1.0, x.norm()) / h.norm();
  const CdNum d = h * e;
  const CdNum y0 = y(x), p1 = y(x + d), m1 = y(x - d), p2 = y(x + d * 2.0), m2 = y(x - d * 2.0);
  return {y0, (p2 * -1.0 + p1 * 8.0 - m1 * 8.0 + m2) / (12 * e),
          (p2 * -1.0 + p1 * 16.0 - y0 * 30.0 + m1 * 16.0 - m2) / (12 * e * e)};
}

inline bool is_constant(const Func& f) {
  const Phrase* p = f.phrase();
  if (!p) return false;
  for (const auto& m : p->terms())
    if (node::count_if(m.tree, [](const Node& n) {
          return n.kind == Node::Kind::Var || n.kind == Node::Kind::ConjVar;
        }) > 0)
      return false;
  return true;
}

inline double nested_step(int n) { return n <= 1 ? 1e-3 : (n == 2 ? 4e-3 : (n == 3 ? 5e-3 : 1e-2)); }

/// (...(y^(n).h_1)...).h_n by nested differences; h_j given as functions of x.
inline CdNum nested_directional(const ScalarMap& y, const CdNum& x, const std::vector<Func>& hs) {
  const double step = nested_step(static_cast<int>(hs.size()));
  if (hs.size() == 2 && is_constant(hs[0]) && is_constant(hs[1])) {
    const CdNum h0 = hs[0](x), h1 = hs[1](x);
    if ((h0 - h1).norm() == 0.0) return jet2(y, x, h0)[2];
  }
  ScalarMap cur = y;
  for (const auto& h : hs) {
    ScalarMap prev = cur;
    cur = [prev, h, step](const CdNum& z) { return directional(prev, z, h(z), step); };
  }
  return cur(x);
}

/// Total derivative dy/dx at x as a real matrix, by central differences.
inline LinOpR jacobian_of(const ScalarMap& f, const CdNum& x, double step = 1e-5) {
  return fd_jacobian(f, x, step * std::max(1.0, x.norm()));
}

/// Samples f at a few points and requires a vanishing imaginary part.
inline void require_real(const Func& f, const std::vector<CdNum>& pts, const std::string& name,
                         double tol = 1e-9) {
  for (const auto& x : pts) {
    const CdNum v = f(x);
    if (v.im().norm() > tol * std::max(1.0, v.norm()))
      throw Error(ErrorCode::NonRealCoefficient, name + " is not real at " + to_string(x));
  }
}

inline void finalize(Solution& s, const ResidualReport& rep) {
  s.residual = rep;
  s.verified = rep.failures.empty() && rep.max <= s.tolerance;
}

}  // namespace octode
