#pragma once

#include <string>
#include <utility>

#include "first_order.hpp"

namespace octode {

/// y = x p + eta(p), p = [dy/dx].1.  bd.alpha0 only places the sample window.
struct ClairautProblem {
  Func eta;
  Func phi = Func::constant(CdNum(0, 0.0));  // general branch phi(x°)
  BoundaryData bd;

  double residual(const ScalarMap& y, const CdNum& x) const {
    const CdNum p = directional(y, x, CdNum(0, 1.0));
    return (y(x) - x * p - eta(p)).norm();
  }
};

/// y = x f(p) + s(p) x + eta(p), p = [dy/dx].h, exactly one of f, s nonzero.
struct LagrangeProblem {
  Func f = Func::constant(CdNum(0, 0.0));
  Func s = Func::constant(CdNum(0, 0.0));
  Func eta;
  CdNum h = CdNum(0, 1.0);
  CdNum p0, x0;  // x(p0) = x0
  bool commuting_ansatz = true;
  BoundaryData bd;

  bool uses_f() const { return !(f.phrase() && f.phrase()->empty()); }

  CdNum rhs(const CdNum& x, const CdNum& p) const {
    return uses_f() ? x * f(p) + eta(p) : s(p) * x + eta(p);
  }
  double residual(const ScalarMap& y, const CdNum& x) const {
    const CdNum p = directional(y, x, h);
    return (y(x) - rhs(x, p)).norm();
  }
};

/// p at parameter q for a curve (x(q), y(q)): [dy/dx].h with dy/dx = Jy Jx^{-1}.
inline CdNum parametric_slope(const Solution& sol, const CdNum& q, const CdNum& h) {
  const LinOpR jx = jacobian_of(sol.x_of_p, q);
  const LinOpR jy = jacobian_of(sol.y_of_p, q);
  return jy(jx.solve(h.promoted(jx.level())));
}

template <class Problem>
ResidualReport verify_parametric(const Problem& pr, const Solution& sol, const GridSpec& pgrid, const CdNum& h) {
  return residual_over(make_grid(pgrid), [&](const CdNum& q) {
    const CdNum p = parametric_slope(sol, q, h);
    const CdNum x = sol.x_of_p(q);
    const CdNum y = sol.y_of_p(q);
    if constexpr (std::is_same_v<Problem, ClairautProblem>) {
      return (y - x * p - pr.eta(p)).norm();
    } else {
      return (y - pr.rhs(x, p)).norm();
    }
  });
}

// ---------------------------------------------------------------- clairaut

struct ClairautSolution {
  Solution general;
  Solution singular;  // parametric; y(x) filled when eta is c p^2
};

/// Parameter grid: p around the given centre.
inline GridSpec parameter_grid(int level, double re_lo, double span, double radius = 0.3, int points = 50) {
  GridSpec g;
  g.level = level;
  g.points = points;
  g.center_re = re_lo;
  g.margin = 0.0;
  g.span = span;
  g.radius = radius;
  return g;
}

inline ClairautSolution solve_clairaut(const ClairautProblem& pr, const GridSpec& grid = default_grid(),
                                       const GridSpec& pgrid = parameter_grid(2, 0.2, 1.0)) {
  ClairautSolution out;
  const Func eta = pr.eta, phi = pr.phi;

  Solution& g = out.general;
  g.y = [eta, phi](const CdNum& x) {
    const CdNum c = phi(x.im());
    return x * c + eta(c);
  };
  g.repr = Solution::Repr::ClosedForm;
  g.printable = "y = x*phi(Im x) + eta(phi(Im x)), phi = " + phi.label();
  g.tolerance = tol::kClosedForm;
  verify_into(pr, g, grid);

  Solution& s = out.singular;
  s.repr = Solution::Repr::Parametric;
  const CdNum one(0, 1.0);
  s.x_of_p = [eta, one](const CdNum& p) { return -eta.derivative(p)(one.promoted(p.level())); };
  s.y_of_p = [eta](const CdNum& p) { return -eta.derivative(p)(p) + eta(p); };
  s.printable = "x = -(d eta/dp).1, y = -(d eta/dp).p + eta(p)";
  s.tolerance = tol::kClosedForm;

  // catalog: eta = c p^2 gives x = -2cp, y = -x^2/(4c)
  if (const Phrase* e = eta.phrase(); e && e->terms().size() == 1 && node::equal(e->terms()[0].tree, node::power(2))) {
    const double c = e->terms()[0].scale;
    const double k = -1.0 / (4 * c);
    s.y = [k](const CdNum& x) { return x * x * k; };
    s.printable = k == 1.0 ? "y = x^2" : "y = " + format_double(k, 12) + "*x^2";
    ResidualReport rx = verify_residual(pr, s, grid);
    ResidualReport rp = verify_parametric(pr, s, pgrid, one);
    for (size_t i = 0; i < rp.points.size(); ++i) rx.add(rp.points[i], rp.residuals[i]);
    for (const auto& f : rp.failures) rx.failures.push_back(f);
    rx.finish();
    finalize(s, rx);
  } else {
    finalize(s, verify_parametric(pr, s, pgrid, one));
  }
  return out;
}

// ---------------------------------------------------------------- lagrange

/// Line solutions from roots p* of p = h F(p): y = x F(p*) + eta(p*) (or F(p*) x + eta(p*)).
inline Solution lagrange_constant_slope(const LagrangeProblem& pr, const CdNum& pstar,
                                        const GridSpec& grid = default_grid()) {
  const CdNum F = pr.uses_f() ? pr.f(pstar) : pr.s(pstar);
  if ((pstar - pr.h * F).norm() > 1e-9)
    throw Error(ErrorCode::InvalidArgument, "p* does not satisfy p = h F(p)");
  Solution sol;
  const auto pr2 = pr;
  sol.y = [pr2, pstar](const CdNum& x) { return pr2.rhs(x, pstar); };
  sol.repr = Solution::Repr::ClosedForm;
  sol.printable = "constant slope p = " + to_string(pstar);
  sol.tolerance = tol::kClosedForm;
  verify_into(pr, sol, grid);
  return sol;
}

/// Catalog case y = x p^2 + p^2: eliminating p from the parametric pair gives y = [(x+1)^(1/2) + C]^2, C real.
inline Solution lagrange_sqrt_family(const LagrangeProblem& pr, double C, const GridSpec& grid = default_grid()) {
  auto is_square = [](const Func& f) {
    const Phrase* e = f.phrase();
    return e && e->terms().size() == 1 && e->terms()[0].scale == 1.0 && node::equal(e->terms()[0].tree, node::power(2));
  };
  if (!pr.uses_f() || !is_square(pr.f) || !is_square(pr.eta) || (pr.h - CdNum(0, 1.0)).norm() != 0.0)
    throw Error(ErrorCode::ShapeMismatch, "catalog form needs f = p^2, eta = p^2, h = 1");
  Solution sol;
  sol.y = [C](const CdNum& x) {
    const CdNum r = cd_pow_real(x + 1.0, 0.5) + C;
    return r * r;
  };
  sol.repr = Solution::Repr::ClosedForm;
  sol.printable = "y = [(x+1)^(1/2) + " + format_double(C, 12) + "]^2";
  sol.branch_notes.push_back("principal square root, Re(x+1) > 0");
  sol.branch_notes.push_back("commuting ansatz: p, x and dp/dx commute");
  sol.tolerance = tol::kClosedForm;
  verify_into(pr, sol, grid);
  return sol;
}

/// Commuting ansatz: dx/dp = h (x F'(p) + eta'(p)) (p - h F(p))^{-1}, integrated on the segment p0 -> p.
inline Solution solve_lagrange(const LagrangeProblem& pr, const GridSpec& pgrid = parameter_grid(2, 0.2, 1.0)) {
  if (!pr.commuting_ansatz)
    throw Error(ErrorCode::AnsatzViolated, "only the commuting ansatz is implemented");
  const bool uf = pr.uses_f();
  const bool us = !(pr.s.phrase() && pr.s.phrase()->empty());
  if (uf == us) throw Error(ErrorCode::ShapeMismatch, "exactly one of f, s must be nonzero");
  const Func F = uf ? pr.f : pr.s;
  const Func eta = pr.eta;
  const CdNum h = pr.h, p0 = pr.p0, x0 = pr.x0;
  const CdNum one(0, 1.0);

  Solution sol;
  sol.repr = Solution::Repr::Parametric;
  sol.x_of_p = [=](const CdNum& p) {
    const CdNum dp = p - p0;
    auto rhs = [&](double tau, const CdNum& x) {
      const CdNum q = p0 + dp * tau;
      const CdNum den = q - h * F(q);
      if (den.norm() < 1e-12) throw Error(ErrorCode::NonInvertibleOperator, "p - h F(p) vanishes at " + to_string(q));
      const CdNum dF = directional(F.map(), q, one);
      const CdNum de = directional(eta.map(), q, one);
      return h * (x * dF + de) * cd_inv(den) * dp;
    };
    constexpr int N = 100;
    const double dt = 1.0 / N;
    CdNum x = x0.promoted(std::max(x0.level(), p.level()));
    for (int i = 0; i < N; ++i) {
      const double t = i * dt;
      const CdNum k1 = rhs(t, x);
      const CdNum k2 = rhs(t + dt / 2, x + k1 * (dt / 2));
      const CdNum k3 = rhs(t + dt / 2, x + k2 * (dt / 2));
      const CdNum k4 = rhs(t + dt, x + k3 * dt);
      x = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6);
    }
    return x;
  };
  const auto pr2 = pr;
  const ScalarMap xp = sol.x_of_p;
  sol.y_of_p = [pr2, xp](const CdNum& p) { return pr2.rhs(xp(p), p); };
  sol.printable = "x(p) from the linear equation in x, y = relation at (x(p), p)";
  sol.branch_notes.push_back("commuting ansatz: p, x and dp/dx commute");
  sol.tolerance = tol::kQuadrature;
  finalize(sol, verify_parametric(pr, sol, pgrid, h));
  return sol;
}

}  // namespace octode
