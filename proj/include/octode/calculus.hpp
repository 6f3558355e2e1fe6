#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "func.hpp"
#include "functions.hpp"
#include "path.hpp"
#include "phrase.hpp"
#include "quadrature.hpp"

namespace octode {

/// Operator-valued integrand: fhat(z, h).
using HatFn = std::function<CdNum(const CdNum& z, const CdNum& h)>;

/// Truncated series sum_k term_k(z - center), term_k homogeneous of degree k.
class SeriesFn {
 public:
  SeriesFn() = default;
  SeriesFn(CdNum center, std::vector<Phrase> terms, double radius)
      : center_(std::move(center)), terms_(std::move(terms)), radius_(radius) {
    for (const auto& t : terms_) {
      prims_.push_back(antiderivative_left(t));
      hats_.push_back(derivative(prims_.back()));
      derivs_.push_back(derivative(t));
    }
  }

  /// sum_k a_k (z - center)^k with real a_k.
  static SeriesFn from_real_coeffs(const CdNum& center, const std::vector<double>& a, double radius) {
    std::vector<Phrase> t;
    for (size_t k = 0; k < a.size(); ++k) {
      t.push_back(k == 0 ? Phrase::real(a[0]) : Phrase::from_tree(node::power(static_cast<int>(k)), a[k]));
    }
    return SeriesFn(center, std::move(t), radius);
  }

  static SeriesFn exp(int order = 40) {
    std::vector<double> a(order + 1);
    double f = 1.0;
    for (int k = 0; k <= order; ++k) {
      a[k] = 1.0 / f;
      f *= (k + 1);
    }
    return from_real_coeffs(CdNum(0), a, INFINITY);
  }
  static SeriesFn sin(int order = 41) {
    std::vector<double> a(order + 1, 0.0);
    double f = 1.0;
    for (int k = 1; k <= order; ++k) {
      f *= k;
      if (k % 2 == 1) a[k] = ((k / 2) % 2 ? -1.0 : 1.0) / f;
    }
    return from_real_coeffs(CdNum(0), a, INFINITY);
  }
  static SeriesFn cos(int order = 40) {
    std::vector<double> a(order + 1, 0.0);
    double f = 1.0;
    a[0] = 1.0;
    for (int k = 1; k <= order; ++k) {
      f *= k;
      if (k % 2 == 0) a[k] = ((k / 2) % 2 ? -1.0 : 1.0) / f;
    }
    return from_real_coeffs(CdNum(0), a, INFINITY);
  }

  const CdNum& center() const { return center_; }
  const std::vector<Phrase>& terms() const { return terms_; }
  int order() const { return static_cast<int>(terms_.size()) - 1; }
  double radius() const { return radius_; }

  CdNum operator()(const CdNum& z) const {
    const CdNum w = z - center_;
    CdNum s(z.level());
    for (const auto& t : terms_) s += t(w);
    return s;
  }

  /// Size of the last retained term at z.
  double tail_bound(const CdNum& z) const { return terms_.empty() ? 0.0 : terms_.back()(z - center_).norm(); }

  LinOpR derivative_at(const CdNum& z) const {
    const CdNum w = z - center_;
    LinOpR d = LinOpR(z.level());
    for (const auto& op : derivs_) {
      if (op.body.empty()) continue;
      d += op.flatten(w);
    }
    return d;
  }

  /// Termwise left primitive.
  CdNum primitive(const CdNum& z) const {
    const CdNum w = z - center_;
    CdNum s(z.level());
    for (const auto& g : prims_) s += g(w);
    return s;
  }

  CdNum hat(const CdNum& z, const CdNum& h) const {
    const CdNum w = z - center_;
    CdNum s(std::max(z.level(), h.level()));
    for (const auto& op : hats_) s += op(w, h);
    return s;
  }

  Func as_func(const std::string& label) const {
    auto self = std::make_shared<SeriesFn>(*this);
    return Func([self](const CdNum& z) { return (*self)(z); }, label,
                [self](const CdNum& z) { return self->derivative_at(z); });
  }

 private:
  CdNum center_;
  std::vector<Phrase> terms_;
  double radius_ = INFINITY;
  std::vector<Phrase> prims_;
  std::vector<OperatorPhrase> hats_;
  std::vector<OperatorPhrase> derivs_;
};

enum class IntegralMode { Symbolic, Quadrature };

/// Quadrature of fhat(gamma(t)).gamma'(t) over every segment.
inline CdNum line_integral_hat(const HatFn& fhat, const Path& path, double rel_tol = 1e-10) {
  CdNum total(path.level());
  const auto& nodes = path.nodes();
  for (size_t s = 1; s < nodes.size(); ++s) {
    const CdNum a = nodes[s - 1], d = nodes[s] - nodes[s - 1];
    auto q = integrate_adaptive([&](double t) { return fhat(a + d * t, d); }, 0.0, 1.0, rel_tol);
    if (!q.converged) throw Error(ErrorCode::QuadratureNonConvergent, "panel doubling did not settle");
    total += q.value;
  }
  return total;
}

/// Same integral with a fixed panel count per segment (smooth in the endpoints).
inline CdNum line_integral_hat_fixed(const HatFn& fhat, const Path& path, int panels) {
  CdNum total(path.level());
  const auto& nodes = path.nodes();
  for (size_t s = 1; s < nodes.size(); ++s) {
    const CdNum a = nodes[s - 1], d = nodes[s] - nodes[s - 1];
    total += integrate_fixed([&](double t) { return fhat(a + d * t, d); }, 0.0, 1.0, panels);
  }
  return total;
}

inline HatFn hat_of(const Phrase& f) {
  Phrase g;
  try {
    g = antiderivative_left(f);
  } catch (const Error& e) {
    throw Error(ErrorCode::NotIntegrable, e.what());
  }
  auto op = std::make_shared<OperatorPhrase>(derivative(g));
  return [op](const CdNum& z, const CdNum& h) { return (*op)(z, h); };
}

inline HatFn hat_of(const SeriesFn& f) {
  auto s = std::make_shared<SeriesFn>(f);
  return [s](const CdNum& z, const CdNum& h) { return s->hat(z, h); };
}

inline CdNum line_integral(const Phrase& f, const Path& path, IntegralMode mode) {
  if (mode == IntegralMode::Symbolic) {
    Phrase g;
    try {
      g = antiderivative_left(f);
    } catch (const Error& e) {
      throw Error(ErrorCode::NotIntegrable, e.what());
    }
    return g(path.end()) - g(path.start());
  }
  return line_integral_hat(hat_of(f), path);
}

inline CdNum line_integral(const SeriesFn& f, const Path& path, IntegralMode mode) {
  if (mode == IntegralMode::Symbolic) return f.primitive(path.end()) - f.primitive(path.start());
  return line_integral_hat(hat_of(f), path);
}

/// w = A(x,y).dx + B(x,y).dy on a product of balls.
struct Form1 {
  using Coef = std::function<CdNum(const CdNum& x, const CdNum& y, const CdNum& h)>;
  Coef A, B;
  int level = 2;
  CdNum x_center, y_center;
  double radius = 1.0;

  LinOpR A_op(const CdNum& x, const CdNum& y) const {
    return LinOpR::from_columns(level, [&](const CdNum& h) { return A(x, y, h); });
  }
  LinOpR B_op(const CdNum& x, const CdNum& y) const {
    return LinOpR::from_columns(level, [&](const CdNum& v) { return B(x, y, v); });
  }
};

namespace detail {
inline CdNum random_in_ball(std::mt19937_64& rng, const CdNum& center, double radius, int level) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud;
  const int n = dim_of(level);
  std::vector<double> v(n);
  double s = 0;
  for (auto& c : v) {
    c = nd(rng);
    s += c * c;
  }
  const double rr = radius * std::pow(ud(rng), 1.0 / n) / std::sqrt(s);
  CdNum z(level);
  for (int k = 0; k < n; ++k) z.set(k, v[k] * rr);
  return center.promoted(level) + z;
}

// [d(A(x,y).i_j)/dy].i_k - [d(B(x,y).i_k)/dx].i_j
inline CdNum exactness_defect(const Form1& f, const CdNum& x, const CdNum& y, int j, int k, double eps) {
  const CdNum hj = CdNum::basis(f.level, j), vk = CdNum::basis(f.level, k);
  const CdNum lhs = (f.A(x, y + vk * eps, hj) - f.A(x, y - vk * eps, hj)) / (2 * eps);
  const CdNum rhs = (f.B(x + hj * eps, y, vk) - f.B(x - hj * eps, y, vk)) / (2 * eps);
  return lhs - rhs;
}
}  // namespace detail

struct ExactnessReport {
  bool exact = false;
  double max_defect = 0.0;
  double scale = 1.0;
  int samples = 0;
};

inline ExactnessReport check_exact(const Form1& form, int samples = 10, uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  ExactnessReport rep;
  rep.samples = samples;
  const int n = dim_of(form.level);
  for (int s = 0; s < samples; ++s) {
    const CdNum x = detail::random_in_ball(rng, form.x_center, form.radius, form.level);
    const CdNum y = detail::random_in_ball(rng, form.y_center, form.radius, form.level);
    const double eps = 1e-4 * std::max({1.0, x.norm(), y.norm()});
    for (int j = 0; j < n; ++j) {
      rep.scale = std::max(rep.scale, form.A(x, y, CdNum::basis(form.level, j)).norm());
      rep.scale = std::max(rep.scale, form.B(x, y, CdNum::basis(form.level, j)).norm());
      for (int k = 0; k < n; ++k)
        rep.max_defect = std::max(rep.max_defect, detail::exactness_defect(form, x, y, j, k, eps).norm());
    }
  }
  rep.exact = rep.max_defect < 1e-5 * rep.scale;
  return rep;
}

/// F(x,y) = int_alpha^x A(t,y).dt + int_beta^y B(alpha,tau).dtau along straight paths.
struct Potential {
  Form1 form;
  CdNum alpha, beta;

  CdNum operator()(const CdNum& x, const CdNum& y) const {
    CdNum out(form.level);
    if ((x - alpha).norm() > 0) {
      out += line_integral_hat([&](const CdNum& t, const CdNum& h) { return form.A(t, y, h); },
                               Path::segment(alpha, x));
    }
    if ((y - beta).norm() > 0) {
      out += line_integral_hat([&](const CdNum& tau, const CdNum& v) { return form.B(alpha, tau, v); },
                               Path::segment(beta, y));
    }
    return out;
  }
};

inline Potential reconstruct_potential(const Form1& form, const CdNum& alpha, const CdNum& beta,
                                       int samples = 6) {
  const auto rep = check_exact(form, samples);
  if (!rep.exact) throw Error(ErrorCode::NotExact, "form fails the exactness test, defect " + format_double(rep.max_defect, 3));
  return Potential{form, alpha.promoted(form.level), beta.promoted(form.level)};
}

enum class FactorDependence { XOnly, YOnly };

struct IntegratingFactor {
  std::function<CdNum(const CdNum&)> mu;  // of x or of y
  FactorDependence dependence = FactorDependence::XOnly;
  CdNum marked;
  int k = 0;
  bool k_consistent = true;
  double compatibility_defect = 0.0;
  ExactnessReport check;  // exactness of (mu A, mu B)
};

struct IntegratingFactorOptions {
  int k = 0;  // fixed partner basis index
  std::optional<CdNum> marked;
  int compat_samples = 4;
  double compat_tol = 1e-4;
};

namespace detail {
// Integrand of the coordinate-wise exponent for basis index j, fixed partner k.
inline CdNum factor_integrand(const Form1& f, FactorDependence dep, const CdNum& x, const CdNum& y, int j, int k) {
  const double eps = 1e-4 * std::max({1.0, x.norm(), y.norm()});
  if (dep == FactorDependence::XOnly) {
    const CdNum d = exactness_defect(f, x, y, j, k, eps);
    return d * cd_inv(f.B(x, y, CdNum::basis(f.level, k)));
  }
  // roles swapped: j runs over y directions, k is the fixed x direction
  const CdNum d = exactness_defect(f, x, y, k, j, eps);
  return (-d) * cd_inv(f.A(x, y, CdNum::basis(f.level, k)));
}

inline CdNum factor_exponent(const Form1& f, FactorDependence dep, const CdNum& marked, const CdNum& other,
                             const CdNum& target, int k) {
  CdNum expo(f.level);
  CdNum cur = marked;
  for (int j = 0; j < dim_of(f.level); ++j) {
    const double a = cur[j], b = target[j];
    if (a == b) continue;
    const CdNum base = cur;
    auto integrand = [&](double s) {
      CdNum p = base;
      p.set(j, s);
      return dep == FactorDependence::XOnly ? factor_integrand(f, dep, p, other, j, k)
                                            : factor_integrand(f, dep, other, p, j, k);
    };
    expo += integrate_fixed(integrand, a, b, 8);
    cur.set(j, b);
  }
  return expo;
}
}  // namespace detail

/// Factor depending on one variable, from the quaternion coordinate-wise formula.
inline IntegratingFactor integrating_factor(const Form1& form, FactorDependence dep,
                                            const IntegratingFactorOptions& opt = {}) {
  if (form.level != 2) throw Error(ErrorCode::NotQuaternion, "integrating factor needs quaternions");
  IntegratingFactor out;
  out.dependence = dep;
  out.k = opt.k;
  const CdNum own_center = dep == FactorDependence::XOnly ? form.x_center : form.y_center;
  const CdNum other_center = dep == FactorDependence::XOnly ? form.y_center : form.x_center;
  out.marked = opt.marked ? opt.marked->promoted(2) : own_center.promoted(2);

  // integrand must not depend on the other variable
  std::mt19937_64 rng(11);
  for (int s = 0; s < opt.compat_samples; ++s) {
    const CdNum p = detail::random_in_ball(rng, own_center, form.radius, 2);
    const CdNum o1 = detail::random_in_ball(rng, other_center, form.radius, 2);
    const CdNum o2 = detail::random_in_ball(rng, other_center, form.radius, 2);
    for (int j = 0; j < 4; ++j) {
      const CdNum a = dep == FactorDependence::XOnly ? detail::factor_integrand(form, dep, p, o1, j, opt.k)
                                                     : detail::factor_integrand(form, dep, o1, p, j, opt.k);
      const CdNum b = dep == FactorDependence::XOnly ? detail::factor_integrand(form, dep, p, o2, j, opt.k)
                                                     : detail::factor_integrand(form, dep, o2, p, j, opt.k);
      out.compatibility_defect = std::max(out.compatibility_defect, (a - b).norm() / std::max(1.0, a.norm()));
    }
  }
  if (out.compatibility_defect > opt.compat_tol)
    throw Error(ErrorCode::CompatibilityFailed,
                "integrand varies with the other variable by " + format_double(out.compatibility_defect, 3));

  const Form1 f = form;
  const CdNum marked = out.marked;
  const int k = opt.k;
  out.mu = [f, dep, marked, other_center, k](const CdNum& z) {
    return cd_exp(detail::factor_exponent(f, dep, marked, other_center.promoted(2), z.promoted(2), k));
  };

  // other partner indices should give the same factor
  const CdNum probe = marked + CdNum(2, {0.3, -0.2, 0.25, 0.1}) * (0.5 * form.radius);
  const CdNum ref = out.mu(probe);
  for (int kk = 0; kk < 4; ++kk) {
    if (kk == k) continue;
    try {
      const CdNum alt = cd_exp(detail::factor_exponent(f, dep, marked, other_center.promoted(2), probe, kk));
      if ((alt - ref).norm() > 1e-6 * std::max(1.0, ref.norm())) out.k_consistent = false;
    } catch (const Error&) {
      // B.i_k or A.i_k vanishes for this partner
    }
  }

  Form1 scaled = form;
  auto mu = out.mu;
  if (dep == FactorDependence::XOnly) {
    scaled.A = [f, mu](const CdNum& x, const CdNum& y, const CdNum& h) { return mu(x) * f.A(x, y, h); };
    scaled.B = [f, mu](const CdNum& x, const CdNum& y, const CdNum& v) { return mu(x) * f.B(x, y, v); };
  } else {
    scaled.A = [f, mu](const CdNum& x, const CdNum& y, const CdNum& h) { return mu(y) * f.A(x, y, h); };
    scaled.B = [f, mu](const CdNum& x, const CdNum& y, const CdNum& v) { return mu(y) * f.B(x, y, v); };
  }
  out.check = check_exact(scaled, 4);
  return out;
}

}  // namespace octode
