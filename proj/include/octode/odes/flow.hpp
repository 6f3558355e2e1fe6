#pragma once

#include <cmath>
#include <string>

#include "../functions.hpp"
#include "../taylor.hpp"
#include "problem.hpp"

namespace octode {

/// Flow of dx/dt = h(x) started on the hyperplane Re x = alpha0.
/// omega(x) = Phi(Re x - alpha0, alpha0 + Im x) satisfies (d omega/dx).1 = h(omega) and omega = id on the hyperplane.
class Flow {
 public:
  enum class Kind { Constant, Identity, Power, Series, Native };

  struct Foot {
    double t = 0.0;
    CdNum b;  // Re b = alpha0
  };

  Flow(const Func& h, double alpha0, int level) : h_(h), alpha0_(alpha0), level_(level) { classify(); }

  Kind kind() const { return kind_; }
  double alpha0() const { return alpha0_; }
  int level() const { return level_; }
  const Func& h() const { return h_; }
  const CdNum& constant_value() const { return c_; }
  int power() const { return n_; }

  std::string describe() const {
    switch (kind_) {
      case Kind::Constant: return "x + (" + to_string(c_) + ")*t";
      case Kind::Identity: return "exp(t)*b";
      case Kind::Power: return "[b^(1-n) + (1-n)t]^(1/(1-n)), n = " + std::to_string(n_);
      case Kind::Series: return "taylor-stepped flow";
      case Kind::Native: return "rk4 flow";
    }
    return "";
  }

  CdNum at(double t, const CdNum& b) const {
    switch (kind_) {
      case Kind::Constant: return b + c_ * t;
      case Kind::Identity: return b * std::exp(t);
      case Kind::Power: {
        const double e = 1.0 - n_;
        return cd_pow_real(cd_pow_real(b, e) + CdNum(0, e * t), 1.0 / e);
      }
      case Kind::Series: return series_march(t, b);
      case Kind::Native: return rk4_march(t, b);
    }
    return b;
  }

  CdNum omega(const CdNum& x) const { return at(x.re() - alpha0_, hyper(x)); }

  /// Finds (t, b) with Phi(t, b) = X.
  Foot locate(const CdNum& X) const {
    const CdNum x = X.promoted(std::max(X.level(), level_));
    switch (kind_) {
      case Kind::Constant: {
        const double t = (x.re() - alpha0_) / c_.re();
        return {t, x - c_ * t};
      }
      case Kind::Identity: {
        if (alpha0_ <= 0 || x.re() <= 0)
          throw Error(ErrorCode::InvalidArgument, "identity flow needs alpha0 > 0 and Re x > 0");
        const double t = std::log(x.re() / alpha0_);
        return {t, x * std::exp(-t)};
      }
      default: return locate_newton(x);
    }
  }

  CdNum hyper(const CdNum& x) const {
    CdNum b = x.im().promoted(std::max(x.level(), level_));
    b.set(0, alpha0_);
    return b;
  }

 private:
  void classify() {
    const Phrase* p = h_.phrase();
    if (!p) {
      kind_ = Kind::Native;
      return;
    }
    bool has_var = false;
    for (const auto& m : p->terms())
      has_var |= node::count_if(m.tree, [](const Node& n) {
                   return n.kind == Node::Kind::Var || n.kind == Node::Kind::ConjVar;
                 }) > 0;
    if (!has_var) {
      kind_ = Kind::Constant;
      c_ = p->eval(CdNum(level_)).promoted(level_);
      if (c_.norm() < 1e-12) throw Error(ErrorCode::ZeroVectorField, "h vanishes identically");
      if (std::abs(c_.re()) < 1e-12)
        throw Error(ErrorCode::InvalidArgument, "h is tangent to the boundary hyperplane");
      return;
    }
    if (p->terms().size() == 1 && p->terms()[0].scale == 1.0) {
      const auto& t = p->terms()[0].tree;
      if (t->kind == Node::Kind::Var) {
        kind_ = Kind::Identity;
        return;
      }
      for (int n = 2; n <= 12; ++n)
        if (node::equal(t, node::power(n))) {
          kind_ = Kind::Power;
          n_ = n;
          return;
        }
    }
    kind_ = Kind::Series;
  }

  static constexpr int kOrder = 16;

  /// One Taylor step of length dt from x0; also returns the root-test radius estimate.
  Taylor local_series(const CdNum& x0) const {
    Taylor s = Taylor::constant(x0, kOrder);
    for (int k = 0; k < kOrder; ++k) {
      Taylor hx = compose(*h_.phrase(), s);
      s.c[k + 1] = hx.c[k] / (k + 1);
    }
    return s;
  }

  static double radius_of(const Taylor& s) {
    double worst = 1e-300;
    for (int k = 1; k <= s.order(); ++k) {
      const double a = s.c[k].norm();
      if (a > 0) worst = std::max(worst, std::pow(a, 1.0 / k));
    }
    return 1.0 / worst;
  }

  CdNum series_march(double t, const CdNum& b) const {
    CdNum x = b.promoted(std::max(b.level(), level_));
    double done = 0.0;
    const double dir = t >= 0 ? 1.0 : -1.0;
    for (int guard = 0; std::abs(t - done) > 0; ++guard) {
      if (guard > 10000) throw Error(ErrorCode::SeriesDiverged, "flow step collapsed");
      const Taylor s = local_series(x);
      const double rho = radius_of(s);
      if (rho < 1e-6) throw Error(ErrorCode::SeriesDiverged, "flow radius estimate below 1e-6");
      const double dt = std::min({0.25, 0.15 * rho, std::abs(t - done)});
      x = s(dir * dt);
      done += dir * dt;
      if (std::abs(t - done) < 1e-15) break;
    }
    return x;
  }

  CdNum rk4_march(double t, const CdNum& b) const {
    const int steps = 256 * std::max(1, static_cast<int>(std::ceil(std::abs(t))));
    const double dt = t / steps;
    CdNum x = b.promoted(std::max(b.level(), level_));
    for (int i = 0; i < steps; ++i) {
      const CdNum k1 = h_(x);
      const CdNum k2 = h_(x + k1 * (dt / 2));
      const CdNum k3 = h_(x + k2 * (dt / 2));
      const CdNum k4 = h_(x + k3 * dt);
      x = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6);
    }
    return x;
  }

  /// Unknown packed as (t, b°) in one CdNum.
  Foot locate_newton(const CdNum& X) const {
    const CdNum hx = h_(X);
    if (hx.norm() < 1e-12) throw Error(ErrorCode::ZeroVectorField, "h vanishes at " + to_string(X));
    double t0 = X.re() - alpha0_;
    if (std::abs(hx.re()) > 1e-3 * hx.norm()) t0 /= hx.re();
    CdNum u = (X - hx * t0).im();
    u = u.promoted(std::max(u.level(), level_));
    u.set(0, t0);
    auto unpack = [this](const CdNum& v) {
      CdNum b = v;
      b.set(0, alpha0_);
      return Foot{v.re(), b};
    };
    ScalarMap F = [&](const CdNum& v) {
      const Foot f = unpack(v);
      return at(f.t, f.b) - X;
    };
    NewtonOptions opt;
    opt.step_tol = 1e-13;
    const auto r = newton_solve(F, JacobianMap{}, u, opt);
    return unpack(r.root);
  }

  Func h_;
  double alpha0_;
  int level_;
  Kind kind_ = Kind::Native;
  CdNum c_;
  int n_ = 0;
};

struct OmegaResult {
  Flow flow;
  std::string form;
  CdNum operator()(const CdNum& x) const { return flow.omega(x); }
};

/// omega_h with omega = id on Re x = alpha0.
inline OmegaResult solve_omega(const Func& h, double alpha0 = 0.0, int level = 2) {
  const CdNum probe = CdNum(level, alpha0);
  if (h(probe).norm() < 1e-12) throw Error(ErrorCode::ZeroVectorField, "h(alpha) vanishes");
  Flow f(h, alpha0, level);
  return {f, f.describe()};
}

/// Integral of g(Phi(s, b)) over s in [0, t], fixed Gauss panels.
template <class G>
CdNum along(const Flow& flow, const Flow::Foot& foot, G&& g, int panels = 4) {
  if (foot.t == 0.0) return CdNum(flow.level());
  return integrate_fixed([&](double s) { return g(flow.at(s, foot.b), s); }, 0.0, foot.t, panels);
}

}  // namespace octode
