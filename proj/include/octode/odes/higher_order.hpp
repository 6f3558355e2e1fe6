#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "first_order.hpp"

namespace octode {

// ---------------------------------------------------------------- iterated n-th order

/// (...(y^(n).h)...).h = g with every h_j equal; bd carries eta_0, higher carries eta_1..eta_{n-1}.
struct NthOrderProblem {
  int n = 1;
  Func g;
  std::vector<Func> h;
  BoundaryData bd;
  std::vector<Func> higher;

  double residual(const ScalarMap& y, const CdNum& x) const {
    return (nested_directional(y, x, h) - g(x)).norm();
  }
};

namespace detail {

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

inline void require_same_fields(const std::vector<Func>& hs, int level) {
  if (hs.empty()) throw Error(ErrorCode::ShapeMismatch, "no direction fields given");
  const auto pts = make_grid([level] {
    GridSpec g;
    g.level = level;
    g.points = 8;
    return g;
  }());
  for (size_t j = 1; j < hs.size(); ++j)
    for (const auto& x : pts)
      if ((hs[j](x) - hs[0](x)).norm() > 1e-12)
        throw Error(ErrorCode::ShapeMismatch, "iterated directions must coincide");
}

/// sum_{k<m} eta_k t^k/k! + int_0^t (t-s)^(m-1)/(m-1)! u(Phi(s)) ds
inline CdNum iterate_back(const Flow& flow, const Flow::Foot& foot, const std::vector<Func>& etas, int m,
                          const ScalarMap& u, int panels = 4) {
  CdNum acc(flow.level());
  for (int k = 0; k < m; ++k) acc += etas[k](foot.b.im()) * (std::pow(foot.t, k) / factorial(k));
  const double t = foot.t;
  acc += along(flow, foot, [&](const CdNum& z, double s) {
    return u(z) * (std::pow(t - s, m - 1) / factorial(m - 1));
  }, panels);
  return acc;
}

}  // namespace detail

inline Solution solve_nth_order_iterated(const NthOrderProblem& pr, const GridSpec& grid = default_grid()) {
  if (pr.n < 1 || static_cast<int>(pr.h.size()) != pr.n)
    throw Error(ErrorCode::ShapeMismatch, "need n >= 1 and n direction fields");
  if (static_cast<int>(pr.higher.size()) != pr.n - 1)
    throw Error(ErrorCode::ShapeMismatch, "need n - 1 higher boundary functions");
  detail::require_same_fields(pr.h, grid.level);
  Flow flow(pr.h[0], pr.bd.alpha0, grid.level);
  std::vector<Func> etas{pr.bd.eta};
  for (const auto& e : pr.higher) etas.push_back(e);
  const Func g = pr.g;
  const int n = pr.n;

  Solution sol;
  sol.y = [flow, etas, g, n](const CdNum& x) {
    return detail::iterate_back(flow, flow.locate(x), etas, n, g.map());
  };
  sol.printable = "sum eta_k t^k/k! + int (t-s)^(n-1)/(n-1)! g ds, Phi = " + flow.describe();
  sol.tolerance = detail::flow_tolerance(flow, tol::kQuadrature);
  verify_into(pr, sol, grid);
  return sol;
}

// ---------------------------------------------------------------- normal form

using NormalRhs = std::function<CdNum(const CdNum& x, const std::vector<CdNum>& d)>;

/// y^(n) = F(x, y, y^(1), ..., y^(n-1)) for derivatives iterated along one field h.
/// uses[0] flags x, uses[k + 1] flags y^(k).
struct NormalFormProblem {
  int n = 2;
  Func h = Func::constant(CdNum(0, 1.0));
  NormalRhs rhs;
  std::vector<bool> uses;
  BoundaryData bd;
  std::vector<Func> higher;
  std::string label;

  double residual(const ScalarMap& y, const CdNum& x) const {
    if (n == 2 && is_constant(h)) {
      const auto j = jet2(y, x, h(x));
      return (j[2] - rhs(x, {j[0], j[1]})).norm();
    }
    const auto d = derivs(y, x);
    return (nested_directional(y, x, std::vector<Func>(n, h)) - rhs(x, d)).norm();
  }

  std::vector<CdNum> derivs(const ScalarMap& y, const CdNum& x) const {
    std::vector<CdNum> d{y(x)};
    for (int k = 1; k < n; ++k) d.push_back(nested_directional(y, x, std::vector<Func>(k, h)));
    return d;
  }
};

/// RK4 on (y, y', ..., y^(n-1)) along the characteristic through x.
inline Solution solve_normal_form(const NormalFormProblem& pr, const GridSpec& grid = default_grid()) {
  if (pr.n < 1 || static_cast<int>(pr.higher.size()) != pr.n - 1)
    throw Error(ErrorCode::ShapeMismatch, "need n - 1 higher boundary functions");
  Flow flow(pr.h, pr.bd.alpha0, grid.level);
  std::vector<Func> etas{pr.bd.eta};
  for (const auto& e : pr.higher) etas.push_back(e);
  const NormalRhs rhs = pr.rhs;
  const int n = pr.n;

  Solution sol;
  sol.y = [flow, etas, rhs, n](const CdNum& x) {
    const auto foot = flow.locate(x);
    using State = std::vector<CdNum>;
    State s;
    for (int k = 0; k < n; ++k) s.push_back(etas[k](foot.b.im()).promoted(x.level()));
    auto f = [&](double t, const State& u) {
      State out(n);
      for (int k = 0; k + 1 < n; ++k) out[k] = u[k + 1];
      out[n - 1] = rhs(flow.at(t, foot.b), u);
      return out;
    };
    auto axpy = [&](const State& a, const State& b, double c) {
      State r(n);
      for (int k = 0; k < n; ++k) r[k] = a[k] + b[k] * c;
      return r;
    };
    constexpr int N = 200;
    const double dt = foot.t / N;
    for (int i = 0; i < N; ++i) {
      const double t = i * dt;
      const State k1 = f(t, s);
      const State k2 = f(t + dt / 2, axpy(s, k1, dt / 2));
      const State k3 = f(t + dt / 2, axpy(s, k2, dt / 2));
      const State k4 = f(t + dt, axpy(s, k3, dt));
      for (int k = 0; k < n; ++k) s[k] = s[k] + (k1[k] + k2[k] * 2.0 + k3[k] * 2.0 + k4[k]) * (dt / 6);
    }
    return s[0];
  };
  sol.printable = "rk4 along characteristics of " + pr.h.label();
  sol.tolerance = detail::flow_tolerance(flow, tol::kQuadrature);
  verify_into(pr, sol, grid);
  return sol;
}

// ---------------------------------------------------------------- order reduction

enum class ReduceStrategy { MissingY, Autonomous, TopTwo, Energy };

/// Solution of a reduced problem. For energy and autonomous, v is a function of u = y^(m)
/// and time(u) = int_{u0}^{u} v^{-1} dw on the segment.
struct SubSolution {
  ScalarMap v;
  ScalarMap time;
};

struct Reduction {
  ReduceStrategy strategy;
  NormalFormProblem original;
  NormalFormProblem sub;  // in v (missing_y), u = y^(n-1) (top_two), or v(u) with u as variable
  std::string substitution;
  std::function<ScalarMap(const SubSolution& sub, int level)> back;
  ScalarMap energy_g;  // g(u) for the energy strategy
};

namespace detail {

inline bool uses_only(const NormalFormProblem& p, std::initializer_list<int> allowed) {
  for (size_t i = 0; i < p.uses.size(); ++i) {
    if (!p.uses[i]) continue;
    bool ok = false;
    for (int a : allowed) ok |= static_cast<int>(i) == a;
    if (!ok) return false;
  }
  return true;
}

inline void require_constant_data(const NormalFormProblem& p) {
  if (!is_constant(p.bd.eta)) throw Error(ErrorCode::ShapeMismatch, "boundary data must be constant");
  for (const auto& e : p.higher)
    if (!is_constant(e)) throw Error(ErrorCode::ShapeMismatch, "boundary data must be constant");
  const CdNum one(0, 1.0);
  if (!is_constant(p.h) || !(p.h(CdNum(0)) == one))
    throw Error(ErrorCode::ShapeMismatch, "strategy implemented for h = 1");
}

/// Solves T(u) = t by Newton marching from u0, where T(u) = int_{u0}^{u} w(v) dv on segments.
inline CdNum invert_time(const std::function<CdNum(const CdNum&)>& T, const std::function<CdNum(const CdNum&)>& rate,
                         const CdNum& u0, double t) {
  JacobianMap J = [&](const CdNum& v) { return LinOpR::left_mul(rate(v), v.level()); };
  return march_invert(T, J, [](double s) { return CdNum(0, s); }, u0, t, 4);
}

}  // namespace detail

/// Energy integral E(u) = v0^2 + int_{u0}^{u} ([dw] g(w) + g(w) [dw]) on the straight segment.
inline CdNum energy_integral(const Func& g, const CdNum& u0, const CdNum& v0, const CdNum& u) {
  const CdNum du = u - u0;
  return v0 * v0 + integrate_fixed([&](double tau) {
           const CdNum gw = g(u0 + du * tau);
           return du * gw + gw * du;
         }, 0.0, 1.0, 1);
}

inline Reduction reduce_order(const NormalFormProblem& pr, ReduceStrategy strategy) {
  Reduction r{strategy, pr, {}, "", {}, {}};
  const int n = pr.n;
  if (static_cast<int>(pr.uses.size()) != n + 1) throw Error(ErrorCode::ShapeMismatch, "uses must have n + 1 flags");
  const NormalRhs rhs = pr.rhs;
  switch (strategy) {
    case ReduceStrategy::MissingY: {
      if (n < 2 || pr.uses[1]) throw Error(ErrorCode::ShapeMismatch, "missing_y needs n >= 2 and no y");
      NormalFormProblem s;
      s.n = n - 1;
      s.h = pr.h;
      s.rhs = [rhs](const CdNum& x, const std::vector<CdNum>& d) {
        std::vector<CdNum> full{CdNum(x.level())};
        full.insert(full.end(), d.begin(), d.end());
        return rhs(x, full);
      };
      s.uses = {pr.uses[0]};
      s.uses.insert(s.uses.end(), pr.uses.begin() + 2, pr.uses.end());
      s.bd = {pr.bd.alpha0, pr.higher[0]};
      s.higher.assign(pr.higher.begin() + 1, pr.higher.end());
      s.label = "v = y'.h";
      r.sub = s;
      r.substitution = "v = y'.h";
      r.back = [pr](const SubSolution& sub, int level) -> ScalarMap {
        Flow flow(pr.h, pr.bd.alpha0, level);
        const std::vector<Func> etas{pr.bd.eta};
        const ScalarMap v = sub.v;
        return [flow, etas, v](const CdNum& x) { return detail::iterate_back(flow, flow.locate(x), etas, 1, v, 1); };
      };
      return r;
    }
    case ReduceStrategy::TopTwo: {
      std::initializer_list<int> ok = {0, n};
      if (n < 2 || !detail::uses_only(pr, ok)) throw Error(ErrorCode::ShapeMismatch, "top_two needs y^(n) = g(x, y^(n-1))");
      NormalFormProblem s;
      s.n = 1;
      s.h = pr.h;
      s.rhs = [rhs, n](const CdNum& x, const std::vector<CdNum>& d) {
        std::vector<CdNum> full(n, CdNum(x.level()));
        full[n - 1] = d[0];
        return rhs(x, full);
      };
      s.uses = {pr.uses[0], true};
      s.bd = {pr.bd.alpha0, pr.higher[n - 2]};
      s.label = "u = y^(n-1)";
      r.sub = s;
      r.substitution = "u = (...(y^(n-1).h)...).h";
      r.back = [pr, n](const SubSolution& sub, int level) -> ScalarMap {
        const ScalarMap u = sub.v;
        Flow flow(pr.h, pr.bd.alpha0, level);
        std::vector<Func> etas{pr.bd.eta};
        for (int k = 0; k + 1 < n - 1; ++k) etas.push_back(pr.higher[k]);
        return [flow, etas, u, n](const CdNum& x) {
          return detail::iterate_back(flow, flow.locate(x), etas, n - 1, u, 1);
        };
      };
      return r;
    }
    case ReduceStrategy::Energy:
    case ReduceStrategy::Autonomous: {
      const bool energy = strategy == ReduceStrategy::Energy;
      if (energy) {
        std::initializer_list<int> ok = {n - 1};
        if (n < 2 || !detail::uses_only(pr, ok)) throw Error(ErrorCode::ShapeMismatch, "energy needs y^(n) = g(y^(n-2))");
      } else if (n != 2 || pr.uses[0]) {
        throw Error(ErrorCode::ShapeMismatch, "autonomous needs y'' = G(y, y')");
      }
      detail::require_constant_data(pr);
      const int m = energy ? n - 2 : 0;  // u = y^(m)
      const CdNum u0 = (m == 0 ? pr.bd.eta : pr.higher[m - 1])(CdNum(0));
      const CdNum v0 = pr.higher[m](CdNum(0));
      // sub-problem: dv/du = G(u, v) v^{-1} in the variable u with h = 1
      NormalFormProblem s;
      s.n = 1;
      s.rhs = [rhs, m, n](const CdNum& u, const std::vector<CdNum>& d) {
        std::vector<CdNum> full(n, CdNum(u.level()));
        full[m] = u;
        full[m + 1] = d[0];
        return rhs(u, full) * cd_inv(d[0]);
      };
      s.uses = {true, true};
      s.bd = {u0.re(), Func::constant(v0)};
      if (energy)
        r.energy_g = [rhs, m, n](const CdNum& u) {
          std::vector<CdNum> full(n, CdNum(u.level()));
          full[m] = u;
          return rhs(u, full);
        };
      s.label = energy ? "v^2 = E(u)" : "v(u) = y'";
      r.sub = s;
      r.substitution = energy ? "u = y^(n-2), v = u'.1, v^2 from the two-sided energy integral" : "v(y) = y'.1";
      r.back = [pr, u0, m](const SubSolution& sub, int level) -> ScalarMap {
        // u(t) from time(u) = t
        const ScalarMap T = sub.time, v = sub.v;
        auto rate = [v](const CdNum& u) { return cd_inv(v(u)); };
        Flow flow(pr.h, pr.bd.alpha0, level);
        ScalarMap ufun = [T, rate, u0, flow](const CdNum& x) {
          return detail::invert_time(T, rate, u0.promoted(x.level()), flow.locate(x).t);
        };
        if (m == 0) return ufun;
        std::vector<Func> etas{pr.bd.eta};
        for (int k = 0; k + 1 < m; ++k) etas.push_back(pr.higher[k]);
        return [flow, etas, ufun, m](const CdNum& x) {
          return detail::iterate_back(flow, flow.locate(x), etas, m, ufun, 1);
        };
      };
      return r;
    }
  }
  throw Error(ErrorCode::ShapeMismatch, "unknown strategy");
}

namespace detail {
/// Memo of the last (u -> value) pair; Newton asks for T and v at the same point.
struct SegmentMemo {
  CdNum u;
  std::pair<CdNum, CdNum> vt;
  bool valid = false;
};
}  // namespace detail

/// Sub-solution of a reduction. Energy and autonomous sub-problems live on the segment from u0.
inline SubSolution solve_sub(const Reduction& r) {
  if (r.strategy == ReduceStrategy::MissingY || r.strategy == ReduceStrategy::TopTwo) {
    GridSpec quiet = default_grid();
    quiet.points = 1;
    return {solve_normal_form(r.sub, quiet).y, {}};
  }
  const CdNum u0(0, r.sub.bd.alpha0);
  const CdNum v0 = r.sub.bd.eta(CdNum(0));
  if (r.strategy == ReduceStrategy::Energy) {
    const Func g(r.energy_g, "g");
    ScalarMap v = [g, u0, v0](const CdNum& u) {
      const RootSet rs = sqrt_set(energy_integral(g, u0.promoted(u.level()), v0, u));
      if (rs.kind == RootSet::Kind::Sphere) throw Error(ErrorCode::BranchUndefined, "v^2 is negative real");
      const CdNum& a = rs.points[0];
      return dot(a, v0) >= 0 ? a : rs.points.size() > 1 ? rs.points[1] : a;
    };
    ScalarMap T = [v, u0](const CdNum& u) {
      const CdNum du = u - u0.promoted(u.level());
      if (du.norm() == 0.0) return CdNum(u.level());
      return integrate_fixed([&](double tau) { return cd_inv(v(u0 + du * tau)) * du; }, 0.0, 1.0, 2);
    };
    return {v, T};
  }
  // coupled RK4 for (v, T) on the segment u0 -> u
  const NormalRhs rhs = r.sub.rhs;
  auto memo = std::make_shared<detail::SegmentMemo>();
  auto run = [rhs, u0, v0, memo](const CdNum& u) {
    if (memo->valid && memo->u == u) return memo->vt;
    const CdNum du = u - u0.promoted(u.level());
    CdNum v = v0.promoted(u.level()), T(u.level());
    constexpr int N = 100;
    const double dt = 1.0 / N;
    auto f = [&](double tau, const CdNum& w) { return rhs(u0 + du * tau, {w}) * du; };
    for (int i = 0; i < N; ++i) {
      const double t = i * dt;
      const CdNum k1 = f(t, v);
      const CdNum v2 = v + k1 * (dt / 2);
      const CdNum k2 = f(t + dt / 2, v2);
      const CdNum v3 = v + k2 * (dt / 2);
      const CdNum k3 = f(t + dt / 2, v3);
      const CdNum v4 = v + k3 * dt;
      const CdNum k4 = f(t + dt, v4);
      T += (cd_inv(v) + cd_inv(v2) * 2.0 + cd_inv(v3) * 2.0 + cd_inv(v4)) * du * (dt / 6);
      v = v + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6);
    }
    *memo = {u, {v, T}, true};
    return memo->vt;
  };
  return {[run](const CdNum& u) { return run(u).first; }, [run](const CdNum& u) { return run(u).second; }};
}

/// Solves the sub-problem, rebuilds y and checks the original equation.
inline Solution solve_reduced(const Reduction& r, const GridSpec& grid = default_grid()) {
  Solution sol;
  sol.y = r.back(solve_sub(r), grid.level);
  sol.printable = "reduced: " + r.substitution;
  sol.branch_notes.push_back("commutative ansatz for the reduced variables");
  sol.tolerance = tol::kNewton;
  verify_into(r.original, sol, grid);
  return sol;
}

// ---------------------------------------------------------------- product substitution

/// y'' + y' f(x) + y' g(y) y' = 0 on the real axis, y' = v(y) u(x).
struct ProductProblem {
  Func f, g;
  BoundaryData bd;  // y(alpha0) = eta
  CdNum slope;      // y'(alpha0)

  double residual(const ScalarMap& y, const CdNum& x) const {
    const auto j = jet2(y, x, CdNum(0, 1.0));
    return (j[2] + j[1] * f(x) + j[1] * g(j[0]) * j[1]).norm();
  }
};

/// u = exp(-int f), v = C exp(-int g); then int v^{-1} dy = int u dx by Newton.
inline Solution solve_product_substitution(const ProductProblem& pr, GridSpec grid = default_grid()) {
  grid.plane = 0;
  const double a0 = pr.bd.alpha0;
  const Func f = pr.f, g = pr.g;
  const CdNum y0 = pr.bd.eta(CdNum(0));
  const CdNum C = pr.slope;
  auto integral = [](const Func& fn, const CdNum& lo, const CdNum& hi) {
    const CdNum d = hi - lo;
    if (d.norm() == 0.0) return CdNum(hi.level());
    return integrate_fixed([&](double tau) { return fn(lo + d * tau) * d; }, 0.0, 1.0, 1);
  };
  auto u = [=](const CdNum& x) { return cd_exp(-integral(f, CdNum(x.level(), a0), x)); };
  auto vinv = [=](const CdNum& y) { return cd_exp(integral(g, y0.promoted(y.level()), y)) * cd_inv(C); };
  Solution sol;
  sol.y = [=](const CdNum& x) {
    const CdNum xa(x.level(), a0);
    // Y(y) = int_{y0}^{y} v^{-1}, X(x) = int_{a0}^{x} u
    const CdNum target = integrate_fixed([&](double tau) { return u(xa + (x - xa) * tau); }, 0.0, 1.0, 2) * (x - xa);
    ScalarMap Y = [&](const CdNum& y) {
      const CdNum d = y - y0;
      if (d.norm() == 0.0) return CdNum(y.level());
      return integrate_fixed([&](double tau) { return vinv(y0 + d * tau); }, 0.0, 1.0, 2) * d;
    };
    JacobianMap J = [&](const CdNum& y) { return LinOpR::left_mul(vinv(y), y.level()); };
    auto tgt = [&](double s) { return target * s; };
    return detail::march_invert(Y, J, tgt, y0.promoted(x.level()), 1.0, 4);
  };
  sol.printable = "y' = v(y) u(x), u = exp(-int f), v = C exp(-int g)";
  sol.branch_notes.push_back("u and v real: real axis only");
  sol.tolerance = tol::kQuadrature;
  verify_into(pr, sol, grid);
  return sol;
}

// ---------------------------------------------------------------- collapse

/// h = sum a_j h_j after checking every a_j is real on the sample points.
inline Func collapse_real_combination(const std::vector<std::pair<Func, Func>>& pairs,
                                      const std::vector<CdNum>& samples) {
  if (pairs.empty()) throw Error(ErrorCode::InvalidArgument, "empty combination");
  bool symbolic = true;
  for (const auto& [a, h] : pairs) {
    require_real(a, samples, "a_j (" + a.label() + ")");
    symbolic &= a.phrase() && h.phrase();
  }
  if (symbolic) {
    Phrase sum = Phrase::zero();
    for (const auto& [a, h] : pairs) sum += *a.phrase() * *h.phrase();
    return Func(sum);
  }
  auto ps = pairs;
  return Func([ps](const CdNum& x) {
    CdNum acc(x.level());
    for (const auto& [a, h] : ps) acc += a(x) * h(x);
    return acc;
  }, "sum a_j h_j");
}

inline Func collapse_real_combination(const std::vector<std::pair<Func, Func>>& pairs, int level = 2) {
  GridSpec g;
  g.level = level;
  g.points = 10;
  return collapse_real_combination(pairs, make_grid(g));
}

}  // namespace octode
