#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "../calculus.hpp"
#include "flow.hpp"

namespace octode {

// ---------------------------------------------------------------- problems

struct SimplestProblem {
  Func f;
  Func h = Func::constant(CdNum(0, 1.0));
  BoundaryData bd;

  // [dy/dx].h - f
  double residual(const ScalarMap& y, const CdNum& x) const { return (directional(y, x, h(x)) - f(x)).norm(); }
};

struct LinearProblem {
  Func b, Q;
  Func h = Func::constant(CdNum(0, 1.0));
  BoundaryData bd;

  double residual(const ScalarMap& y, const CdNum& x) const {
    const CdNum yx = y(x);
    return (directional(y, x, h(x)) + b(x) * yx - Q(x)).norm();
  }
};

struct SeparatedProblem {
  Func f, s;
  Func h = Func::constant(CdNum(0, 1.0));
  BoundaryData bd;
  std::optional<CdNum> guess;

  double residual(const ScalarMap& y, const CdNum& x) const {
    return (f(y(x)) * directional(y, x, h(x)) + s(x)).norm();
  }
};

enum class RatioSide { Right, Left };  // y = u x  or  y = x u

struct HomogeneousProblem {
  Func f;
  CdNum h = CdNum(0, 1.0);
  RatioSide side = RatioSide::Right;
  BoundaryData bd;

  CdNum ratio(const CdNum& x, const CdNum& y) const {
    return side == RatioSide::Right ? y * cd_inv(x) : cd_inv(x) * y;
  }
  double residual(const ScalarMap& y, const CdNum& x) const {
    return (directional(y, x, h) - f(ratio(x, y(x)))).norm();
  }
};

struct BernoulliProblem {
  Func p, s;
  double m = 2.0;
  Func h = Func::constant(CdNum(0, 1.0));
  BoundaryData bd;

  double residual(const ScalarMap& y, const CdNum& x) const {
    const CdNum yx = y(x);
    return (directional(y, x, h(x)) + yx * p(x) - cd_pow_real(yx, m) * s(x)).norm();
  }
};

struct GeneralizedBernoulliProblem {
  Func f, p, s;
  double k = 1.0, m = 2.0;
  Func h = Func::constant(CdNum(0, 1.0));
  BoundaryData bd;

  double residual(const ScalarMap& y, const CdNum& x) const {
    const CdNum yx = y(x);
    return (f(yx) * directional(y, x, h(x)) + cd_pow_real(yx, k) * p(x) - cd_pow_real(yx, m) * s(x)).norm();
  }
};

/// p^2 + b p + p b + c = 0 for p = [dy/dx].h, b and c given as functions of u = x^{-1} y.
struct QuadraticProblem {
  Func b, c;
  CdNum h = CdNum(0, 1.0);
  int branch = 0;  // 0: -b + sqrt, 1: -b - sqrt
  BoundaryData bd;

  double residual(const ScalarMap& y, const CdNum& x) const {
    const CdNum u = cd_inv(x) * y(x);
    const CdNum p = directional(y, x, h);
    const CdNum bu = b(u);
    return (p * p + bu * p + p * bu + c(u)).norm();
  }
};

// ---------------------------------------------------------------- helpers

namespace detail {

inline GridSpec grid_for(GridSpec g, double alpha0) {
  if (std::isnan(g.center_re)) g.center_re = alpha0;
  return g;
}

inline double flow_tolerance(const Flow& fl, double base) {
  return (fl.kind() == Flow::Kind::Constant || fl.kind() == Flow::Kind::Identity) ? base : tol::kNewton;
}

inline Func scaled(const Func& f, double s) {
  if (f.phrase()) return Func(*f.phrase() * s);
  return Func([f, s](const CdNum& z) { return f(z) * s; }, std::to_string(s) + "*(" + f.label() + ")");
}

inline CdNum inv_or_degenerate(const CdNum& a) {
  if (a.norm() < 1e-12) throw Error(ErrorCode::DegenerateDenominator, "denominator vanishes at " + to_string(a));
  return cd_inv(a);
}

/// Newton continuation: solves G(u_k) = target(t_k) for t_k = t k / steps, starting from u0.
inline CdNum march_invert(const ScalarMap& G, const JacobianMap& J, const std::function<CdNum(double)>& target,
                          const CdNum& u0, double t, int steps = 8) {
  CdNum u = u0;
  NewtonOptions opt;
  opt.step_tol = 1e-13;
  for (int k = 1; k <= steps; ++k) {
    const CdNum tk = target(t * k / steps);
    ScalarMap F = [&](const CdNum& v) { return G(v) - tk; };
    u = newton_solve(F, J, u, opt).root;
  }
  return u;
}

}  // namespace detail

inline GridSpec default_grid(int level = 2) {
  GridSpec g;
  g.level = level;
  return g;
}

template <class Problem>
ResidualReport verify_residual(const Problem& pr, const Solution& sol, const GridSpec& grid) {
  const auto pts = make_grid(detail::grid_for(grid, pr.bd.alpha0));
  return residual_over(pts, [&](const CdNum& x) { return pr.residual(sol.y, x); });
}

template <class Problem>
void verify_into(const Problem& pr, Solution& sol, const GridSpec& grid) {
  finalize(sol, verify_residual(pr, sol, grid));
}

// ---------------------------------------------------------------- simplest

inline Solution solve_simplest(const SimplestProblem& pr, const GridSpec& grid = default_grid()) {
  Flow flow(pr.h, pr.bd.alpha0, grid.level);
  Solution sol;
  const double a0 = pr.bd.alpha0;
  const auto bd = pr.bd;

  std::optional<Phrase> g;
  if (flow.kind() == Flow::Kind::Constant && flow.constant_value() == CdNum(flow.level(), 1.0) && pr.f.phrase()) {
    try {
      g = antiderivative_left(*pr.f.phrase());
    } catch (const Error&) {
    }
  }
  if (g) {
    const Phrase G = *g;
    sol.y = [G, bd, a0](const CdNum& x) {
      CdNum base = x.im();
      base.set(0, a0);
      return bd.at(x.im()) + G.eval(x) - G.eval(base);
    };
    sol.repr = Solution::Repr::ClosedForm;
    sol.printable = "eta(Im x) + G(x) - G(" + format_double(a0) + " + Im x), G = " + print_phrase(G);
    sol.tolerance = tol::kClosedForm;
  } else {
    const Func f = pr.f;
    sol.y = [flow, f, bd](const CdNum& x) {
      const auto foot = flow.locate(x);
      return bd.at(foot.b.im()) + along(flow, foot, [&](const CdNum& z, double) { return f(z); });
    };
    sol.printable = "eta(b) + int_0^t f(Phi(s, b)) ds, Phi = " + flow.describe();
    sol.tolerance = detail::flow_tolerance(flow, tol::kQuadrature);
  }
  verify_into(pr, sol, grid);
  return sol;
}

inline Solution solve_simplest(const Func& f, const Func& h, const BoundaryData& bd,
                               const GridSpec& grid = default_grid()) {
  return solve_simplest(SimplestProblem{f, h, bd}, grid);
}

// ---------------------------------------------------------------- linear

inline Solution solve_linear(const LinearProblem& pr, const GridSpec& grid = default_grid()) {
  const auto pts = make_grid(detail::grid_for(grid, pr.bd.alpha0));
  require_real(pr.b, pts, "b");
  Flow flow(pr.h, pr.bd.alpha0, grid.level);
  const Func b = pr.b, Q = pr.Q;
  const auto bd = pr.bd;
  const bool bconst = is_constant(b);
  const double bc = bconst ? b(CdNum(grid.level)).re() : 0.0;

  // B(t) = int_0^t b(Phi(s, b0)) ds, real
  auto B = [flow, b, bconst, bc](const Flow::Foot& foot, double t) {
    if (bconst) return bc * t;
    if (t == 0.0) return 0.0;
    return integrate_fixed([&](double s) { return CdNum(0, b(flow.at(s, foot.b)).re()); }, 0.0, t, 2).re();
  };
  Solution sol;
  sol.y = [flow, Q, bd, B](const CdNum& x) {
    const auto foot = flow.locate(x);
    const CdNum inner = along(flow, foot, [&](const CdNum& z, double s) { return Q(z) * std::exp(B(foot, s)); });
    return (bd.at(foot.b.im()) + inner) * std::exp(-B(foot, foot.t));
  };
  sol.printable = "exp(-B)(eta + int exp(B) Q), B = int b along Phi = " + flow.describe();
  sol.tolerance = detail::flow_tolerance(flow, tol::kQuadrature);
  verify_into(pr, sol, grid);
  return sol;
}

inline Solution solve_linear(const Func& b, const Func& Q, const Func& h, const BoundaryData& bd,
                             const GridSpec& grid = default_grid()) {
  return solve_linear(LinearProblem{b, Q, h, bd}, grid);
}

// ---------------------------------------------------------------- separated

inline Solution solve_separated(const SeparatedProblem& pr, const GridSpec& grid = default_grid()) {
  const auto pts = make_grid(detail::grid_for(grid, pr.bd.alpha0));
  require_real(pr.h, pts, "h");
  if (!pr.f.phrase()) throw Error(ErrorCode::NotLeftReducible, "f must be a phrase to build its antiderivative");
  const Func g(antiderivative_left(*pr.f.phrase()));
  Flow flow(pr.h, pr.bd.alpha0, grid.level);
  const Func s = pr.s;
  const auto bd = pr.bd;
  const auto guess = pr.guess;

  Solution sol;
  sol.y = [flow, g, s, bd, guess](const CdNum& x) {
    const auto foot = flow.locate(x);
    const CdNum eta = bd.at(foot.b.im());
    const CdNum g0 = g(eta);
    auto target = [&](double t) {
      if (t == 0.0) return g0;
      return g0 - integrate_fixed([&](double u) { return s(flow.at(u, foot.b)); }, 0.0, t, 2);
    };
    JacobianMap J = [&](const CdNum& v) { return g.derivative(v); };
    return detail::march_invert(g.map(), J, target, guess ? *guess : eta.promoted(x.level()), foot.t);
  };
  sol.printable = "g(y) = g(eta) - int s, g = " + g.label();
  sol.tolerance = tol::kNewton;
  verify_into(pr, sol, grid);
  return sol;
}

// ---------------------------------------------------------------- homogeneous

inline Solution solve_homogeneous_ratio(const HomogeneousProblem& pr, const GridSpec& grid = default_grid()) {
  const Func hf = Func::constant(pr.h);
  Flow flow(hf, pr.bd.alpha0, grid.level);
  const auto bd = pr.bd;
  const Func f = pr.f;
  const CdNum h = pr.h;
  const RatioSide side = pr.side;

  auto denom = [f, h, side](const CdNum& u) { return f(u) - (side == RatioSide::Right ? u * h : h * u); };

  Solution sol;
  sol.y = [=](const CdNum& x) {
    const auto foot = flow.locate(x);
    const CdNum eta = bd.at(foot.b.im()).promoted(x.level());
    const CdNum binv = cd_inv(foot.b);
    const CdNum u0 = side == RatioSide::Right ? eta * binv : binv * eta;
    CdNum u = u0;
    if (denom(u0).norm() > 1e-10) {
      // P(u) = int_{u0}^{u} (f(v) - vh)^{-1} dv along the straight segment
      ScalarMap P = [&](const CdNum& v) {
        const CdNum dv = v - u0;
        return integrate_fixed(
            [&](double tau) { return detail::inv_or_degenerate(denom(u0 + dv * tau)) * dv; }, 0.0, 1.0, 4);
      };
      JacobianMap J = [&](const CdNum& v) { return LinOpR::left_mul(detail::inv_or_degenerate(denom(v)), v.level()); };
      auto R = [&](double t) {
        if (t == 0.0) return CdNum(x.level());
        return integrate_fixed([&](double s) { return cd_inv(flow.at(s, foot.b)); }, 0.0, t, 4);
      };
      u = detail::march_invert(P, J, R, u0, foot.t);
    }
    return side == RatioSide::Right ? u * x : x * u;
  };
  sol.printable = "int (f(u) - uh)^{-1} du = int x^{-1} dt, y = " +
                  std::string(side == RatioSide::Right ? "u x" : "x u");
  sol.tolerance = tol::kNewton;
  verify_into(pr, sol, grid);
  return sol;
}

// ---------------------------------------------------------------- bernoulli

inline Solution solve_bernoulli(const BernoulliProblem& pr, const GridSpec& grid = default_grid()) {
  if (pr.m == 1.0) throw Error(ErrorCode::InvalidArgument, "m = 1 makes the equation linear homogeneous in y");
  const double l = 1.0 - pr.m;
  const auto pts = make_grid(detail::grid_for(grid, pr.bd.alpha0));
  require_real(pr.p, pts, "p");

  const auto eta = pr.bd.eta;
  BoundaryData vbd{pr.bd.alpha0, Func([eta, l](const CdNum& z) { return cd_pow_real(eta(z), l); }, "eta^(1-m)")};
  LinearProblem lin{detail::scaled(pr.p, l), detail::scaled(pr.s, l), pr.h, vbd};
  GridSpec quiet = grid;
  quiet.points = 1;
  const Solution vs = solve_linear(lin, quiet);

  Solution sol;
  const ScalarMap v = vs.y;
  sol.y = [v, l](const CdNum& x) {
    const CdNum vx = v(x);
    if (vx.norm() < 1e-12) throw Error(ErrorCode::BranchUndefined, "v vanishes at " + to_string(x));
    return cd_pow_real(vx, 1.0 / l);
  };
  sol.printable = "y = v^(1/(1-m)), v linear with b = (1-m)p, Q = (1-m)s";
  sol.branch_notes.push_back("principal branch of v^(1/(1-m))");
  sol.tolerance = tol::kNewton;
  verify_into(pr, sol, grid);
  return sol;
}

// ---------------------------------------------------------------- generalized bernoulli

inline Solution solve_generalized_bernoulli(const GeneralizedBernoulliProblem& pr,
                                            const GridSpec& grid = default_grid()) {
  if (pr.k == pr.m) throw Error(ErrorCode::InvalidArgument, "k = m");
  const auto pts = make_grid(detail::grid_for(grid, pr.bd.alpha0));
  require_real(pr.p, pts, "p");
  require_real(pr.h, pts, "h");
  const double km = pr.k - pr.m;
  const double ex = -1.0 + (1.0 - pr.m) / km;
  const Func f = pr.f, p = pr.p, s = pr.s;
  const auto bd = pr.bd;
  Flow flow(pr.h, pr.bd.alpha0, grid.level);

  // phi(v) = v^ex f(v^(1/(k-m))) / (k-m)
  auto phi = [f, ex, km](const CdNum& v) { return cd_pow_real(v, ex) * f(cd_pow_real(v, 1.0 / km)) / km; };
  const bool homogeneous = is_constant(s) && s(CdNum(grid.level)).norm() == 0.0;

  Solution sol;
  if (homogeneous) {
    sol.y = [=](const CdNum& x) {
      const auto foot = flow.locate(x);
      const CdNum v0 = cd_pow_real(bd.at(foot.b.im()).promoted(x.level()), km);
      // beta(v) = int_{v0}^{v} (k-m) phi(w) w^{-1} dw
      ScalarMap beta = [&](const CdNum& v) {
        const CdNum dv = v - v0;
        return integrate_fixed([&](double tau) {
          const CdNum w = v0 + dv * tau;
          return phi(w) * cd_inv(w) * km * dv;
        }, 0.0, 1.0, 4);
      };
      JacobianMap J = [&](const CdNum& v) { return LinOpR::left_mul(phi(v) * cd_inv(v) * km, v.level()); };
      auto target = [&](double t) {
        if (t == 0.0) return CdNum(x.level());
        return integrate_fixed([&](double u) { return p(flow.at(u, foot.b)); }, 0.0, t, 2) * -km;
      };
      const CdNum v = detail::march_invert(beta, J, target, v0, foot.t);
      return cd_pow_real(v, 1.0 / km);
    };
    sol.printable = "beta(v) = -(k-m) int p, y = v^(1/(k-m))";
  } else {
    sol.y = [=](const CdNum& x) {
      const auto foot = flow.locate(x);
      CdNum v = cd_pow_real(bd.at(foot.b.im()).promoted(x.level()), km);
      constexpr int N = 200;
      const double dt = foot.t / N;
      auto rhs = [&](double t, const CdNum& w) {
        const CdNum z = flow.at(t, foot.b);
        return detail::inv_or_degenerate(phi(w)) * (s(z) - w * p(z).re());
      };
      for (int i = 0; i < N; ++i) {
        const double t = i * dt;
        const CdNum k1 = rhs(t, v);
        const CdNum k2 = rhs(t + dt / 2, v + k1 * (dt / 2));
        const CdNum k3 = rhs(t + dt / 2, v + k2 * (dt / 2));
        const CdNum k4 = rhs(t + dt, v + k3 * dt);
        v = v + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6);
      }
      return cd_pow_real(v, 1.0 / km);
    };
    sol.printable = "phi(v) dv/dt = s - v p along characteristics, y = v^(1/(k-m))";
  }
  sol.branch_notes.push_back("principal branch of v^(1/(k-m))");
  sol.tolerance = tol::kNewton;
  verify_into(pr, sol, grid);
  return sol;
}

// ---------------------------------------------------------------- quadratic in the derivative

/// lambda = -b +- sqrt(b^2 - c); the sphere case is centred at -b.
inline RootSet quadratic_derivative_roots(const CdNum& b, const CdNum& c) {
  RootSet s = sqrt_set(b * b - c);
  if (s.kind == RootSet::Kind::Sphere) {
    s.center = s.center - b;
    return s;
  }
  for (auto& p : s.points) p = p - b;
  return s;
}

inline Solution solve_quadratic(const QuadraticProblem& pr, const GridSpec& grid = default_grid()) {
  const Func b = pr.b, c = pr.c;
  const int branch = pr.branch;
  Func lam([b, c, branch](const CdNum& u) {
    const RootSet r = quadratic_derivative_roots(b(u), c(u));
    if (r.kind == RootSet::Kind::Sphere)
      throw Error(ErrorCode::BranchUndefined, "root sphere: derivative not determined");
    return r.points[std::min<size_t>(branch, r.points.size() - 1)];
  }, "root");
  HomogeneousProblem hp{lam, pr.h, RatioSide::Left, pr.bd};
  GridSpec quiet = grid;
  quiet.points = 1;
  Solution sol = solve_homogeneous_ratio(hp, quiet);
  sol.printable = "homogeneous (left) with f(u) = -b(u) " + std::string(branch == 0 ? "+" : "-") + " sqrt(b^2 - c)";
  sol.branch_notes.push_back(branch == 0 ? "root -b + sqrt" : "root -b - sqrt");
  verify_into(pr, sol, grid);
  return sol;
}

}  // namespace octode
