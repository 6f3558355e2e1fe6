#pragma once

#include <functional>

#include "func.hpp"

namespace octode {

struct NewtonOptions {
  int max_iter = 50;
  double step_tol = 1e-10;
  int max_halvings = 30;
};

struct NewtonResult {
  CdNum root;
  int iterations = 0;
  double residual = 0.0;
};

/// Solves F(x) = 0 over R^{2^r}; steps are halved while the residual grows.
inline NewtonResult newton_solve(const ScalarMap& F, const JacobianMap& J, const CdNum& x0,
                                 const NewtonOptions& opt = {}) {
  CdNum x = x0;
  CdNum fx = F(x);
  for (int it = 1; it <= opt.max_iter; ++it) {
    const LinOpR jac = J ? J(x) : fd_jacobian(F, x);
    CdNum step = jac.solve(-fx);
    double lambda = 1.0;
    CdNum xn = x + step;
    CdNum fn = F(xn);
    int halvings = 0;
    while (fn.norm() > fx.norm() && halvings < opt.max_halvings) {
      lambda *= 0.5;
      xn = x + step * lambda;
      fn = F(xn);
      ++halvings;
    }
    x = xn;
    fx = fn;
    // a damped step proves nothing; only a small full step counts
    if (step.norm() < opt.step_tol * std::max(1.0, x.norm()) || fx.norm() == 0.0) {
      return {x, it, fx.norm()};
    }
  }
  throw Error(ErrorCode::NewtonNonConvergent,
              "no step below tolerance after " + std::to_string(opt.max_iter) + " iterations");
}

/// Solves g(y) = target.
inline NewtonResult newton_invert(const Func& g, const CdNum& target, const CdNum& guess,
                                  const NewtonOptions& opt = {}) {
  ScalarMap F = [&](const CdNum& y) { return g(y) - target; };
  JacobianMap J = [&](const CdNum& y) { return g.derivative(y); };
  return newton_solve(F, J, guess, opt);
}

}  // namespace octode
