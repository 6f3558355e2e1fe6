#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "algebra.hpp"

namespace octode {

struct GaussRule {
  std::vector<double> x, w;  // on [-1, 1]
};

/// Legendre roots by Newton iteration from the Chebyshev guess.
inline GaussRule make_gauss_legendre(int n) {
  GaussRule g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    g.x[i] = x;
    g.w[i] = 2.0 / ((1 - x * x) * dp * dp);
  }
  return g;
}

inline const GaussRule& gauss10() {
  static const GaussRule g = make_gauss_legendre(10);
  return g;
}

/// Composite Gauss-Legendre with a fixed number of equal panels on [a, b].
template <class F>
CdNum integrate_fixed(F&& f, double a, double b, int panels) {
  const auto& g = gauss10();
  const double hp = (b - a) / panels;
  CdNum sum;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * hp;
    const double mid = lo + hp / 2;
    for (size_t i = 0; i < g.x.size(); ++i) sum += f(mid + hp / 2 * g.x[i]) * (g.w[i] * hp / 2);
  }
  return sum;
}

struct QuadratureResult {
  CdNum value;
  int panels = 0;
  bool converged = false;
};

/// Panel doubling until successive estimates differ by less than rel_tol * (1 + |I|).
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-10, int max_panels = 4096) {
  QuadratureResult r;
  int panels = 1;
  CdNum prev = integrate_fixed(f, a, b, panels);
  while (panels < max_panels) {
    panels *= 2;
    CdNum cur = integrate_fixed(f, a, b, panels);
    if ((cur - prev).norm() < rel_tol * (1 + cur.norm())) {
      r.value = cur;
      r.panels = panels;
      r.converged = true;
      return r;
    }
    prev = cur;
  }
  r.value = prev;
  r.panels = panels;
  return r;
}

}  // namespace octode
