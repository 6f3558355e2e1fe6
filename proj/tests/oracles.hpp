#pragma once

// Reference computations that do not go through the library code paths under test.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "octode/algebra.hpp"

namespace oracle {

using Vec = std::vector<double>;

inline Vec conj(Vec a) {
  for (size_t k = 1; k < a.size(); ++k) a[k] = -a[k];
  return a;
}

inline Vec add(const Vec& a, const Vec& b, double s = 1.0) {
  Vec c(a.size());
  for (size_t k = 0; k < a.size(); ++k) c[k] = a[k] + s * b[k];
  return c;
}

// pair-of-halves doubling: (xi, eta)(gamma, delta) = (xi gamma - conj(delta) eta, delta xi + eta conj(gamma))
inline Vec mul(const Vec& a, const Vec& b) {
  const size_t n = a.size();
  if (n == 1) return {a[0] * b[0]};
  const size_t h = n / 2;
  const Vec xi(a.begin(), a.begin() + h), eta(a.begin() + h, a.end());
  const Vec ga(b.begin(), b.begin() + h), de(b.begin() + h, b.end());
  const Vec lo = add(mul(xi, ga), mul(conj(de), eta), -1.0);
  const Vec hi = add(mul(de, xi), mul(eta, conj(ga)));
  Vec out(lo);
  out.insert(out.end(), hi.begin(), hi.end());
  return out;
}

inline octode::CdNum mul(const octode::CdNum& a, const octode::CdNum& b) {
  const int r = std::max(a.level(), b.level());
  return octode::CdNum(r, mul(a.promoted(r).coeffs(), b.promoted(r).coeffs()));
}

/// Power series of exp with the oracle product.
inline octode::CdNum exp_series(const octode::CdNum& z, int terms = 90) {
  octode::CdNum term(z.level(), 1.0), sum(z.level(), 1.0);
  for (int k = 1; k < terms; ++k) {
    term = mul(term, z) * (1.0 / k);
    sum += term;
  }
  return sum;
}

inline octode::CdNum random_cd(std::mt19937_64& rng, int level, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  octode::CdNum z(level);
  for (int k = 0; k < z.dim(); ++k) z.set(k, u(rng));
  return z;
}

/// Random unit purely imaginary number.
inline octode::CdNum random_unit_imag(std::mt19937_64& rng, int level) {
  std::normal_distribution<double> n;
  octode::CdNum z(level);
  double s = 0;
  for (int k = 1; k < z.dim(); ++k) {
    const double v = n(rng);
    z.set(k, v);
    s += v * v;
  }
  return z * (1.0 / std::sqrt(s));
}

/// x + M y  <->  x + i y
inline octode::CdNum from_complex(std::complex<double> c, const octode::CdNum& M) {
  return octode::CdNum(M.level(), c.real()) + M * c.imag();
}

/// Classical RK4 for y' = f(x, y) on [x0, x1].
inline double rk4(const std::function<double(double, double)>& f, double x0, double y0, double x1, int steps = 4000) {
  const double h = (x1 - x0) / steps;
  double x = x0, y = y0;
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(x, y), k2 = f(x + h / 2, y + h / 2 * k1), k3 = f(x + h / 2, y + h / 2 * k2),
                 k4 = f(x + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    x += h;
  }
  return y;
}

/// RK4 for a first-order system.
inline std::vector<double> rk4_system(const std::function<std::vector<double>(double, const std::vector<double>&)>& f,
                                      double x0, std::vector<double> y, double x1, int steps = 4000) {
  const double h = (x1 - x0) / steps;
  auto axpy = [](const std::vector<double>& a, double s, const std::vector<double>& b) {
    std::vector<double> c(a);
    for (size_t i = 0; i < c.size(); ++i) c[i] += s * b[i];
    return c;
  };
  double x = x0;
  for (int i = 0; i < steps; ++i) {
    const auto k1 = f(x, y), k2 = f(x + h / 2, axpy(y, h / 2, k1)), k3 = f(x + h / 2, axpy(y, h / 2, k2)),
               k4 = f(x + h, axpy(y, h, k3));
    for (size_t j = 0; j < y.size(); ++j) y[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    x += h;
  }
  return y;
}

/// Composite Simpson rule.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

}  // namespace oracle
