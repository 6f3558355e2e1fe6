#pragma once

// Shared inputs for unit and acceptance tests: random phrases and the two worked exact forms.

#include <random>
#include <vector>

#include "octode/calculus.hpp"
#include "octode/phrase.hpp"
#include "oracles.hpp"

namespace fixtures {

using namespace octode;

// random word of up to `deg` variable leaves with constants sprinkled in
inline NodePtr random_word(std::mt19937_64& rng, int level, int deg, bool conj) {
  std::uniform_int_distribution<int> coin(0, 3);
  NodePtr t = coin(rng) ? node::var() : node::constant(oracle::random_cd(rng, level));
  for (int i = 0; i < deg; ++i) {
    NodePtr leaf;
    switch (coin(rng)) {
      case 0: leaf = node::constant(oracle::random_cd(rng, level)); break;
      case 1: leaf = conj ? node::conj_var() : node::var(); break;
      default: leaf = node::var();
    }
    t = coin(rng) % 2 ? node::mul(t, leaf) : node::mul(leaf, t);
  }
  return t;
}

inline Phrase random_phrase(std::mt19937_64& rng, int level, bool conj, int terms = 3, int deg = 3) {
  Phrase p;
  std::uniform_real_distribution<double> s(-1, 1);
  for (int i = 0; i < terms; ++i) p.add_term(s(rng), random_word(rng, level, 1 + i % deg, conj));
  p.add_term(1.0, node::constant(oracle::random_cd(rng, level)));
  return p;
}
// x^3 + x^2 y + y x^2 + x y x - y^3 with the oracle product
inline CdNum cubic_potential(const CdNum& x, const CdNum& y) {
  using oracle::mul;
  const CdNum x2 = mul(x, x), y2 = mul(y, y);
  return mul(x2, x) + mul(x2, y) + mul(y, x2) + mul(mul(x, y), x) - mul(y2, y);
}

// partial derivatives of cubic_potential, bracketed as the product rule gives them
inline Form1 cubic_form(int level) {
  Form1 f;
  f.level = level;
  f.x_center = CdNum(level);
  f.y_center = CdNum(level);
  f.radius = 1.0;
  f.A = [](const CdNum& x, const CdNum& y, const CdNum& h) {
    const CdNum x2 = x * x;
    return h * x2 + x * h * x + x2 * h + (h * x + x * h) * y + y * (h * x + x * h) + (h * y) * x + (x * y) * h;
  };
  f.B = [](const CdNum& x, const CdNum& y, const CdNum& v) {
    const CdNum d = x * x - y * y;
    return d * v + v * d + x * v * x - y * v * y;
  };
  return f;
}

// the bracket-free text of the same form
inline Form1 cubic_form_as_written(int level) {
  Form1 f = cubic_form(level);
  f.A = [](const CdNum& x, const CdNum& y, const CdNum& h) {
    const CdNum s = x * x + x * y + y * x;
    return s * h + h * s + x * h * x + x * h * y + y * h * x;
  };
  return f;
}

// sum_k z^k h z^(m-k)
inline CdNum sandwich(const std::vector<CdNum>& pw, const CdNum& h, int m) {
  CdNum s(h.level());
  for (int k = 0; k <= m; ++k) s += (pw[k] * h) * pw[m - k];
  return s;
}

inline std::vector<CdNum> powers(const CdNum& z, int n) {
  std::vector<CdNum> p{CdNum(z.level(), 1.0)};
  for (int k = 1; k <= n; ++k) p.push_back(p.back() * z);
  return p;
}

inline CdNum sin_series(const CdNum& z) {
  using oracle::mul;
  CdNum term = z, sum = z;
  const CdNum z2 = mul(z, z);
  for (int k = 1; k < 30; ++k) {
    term = mul(term, z2) * (-1.0 / ((2 * k) * (2 * k + 1)));
    sum += term;
  }
  return sum;
}

inline CdNum cos_series(const CdNum& z) {
  using oracle::mul;
  CdNum term(z.level(), 1.0), sum(z.level(), 1.0);
  const CdNum z2 = mul(z, z);
  for (int k = 1; k < 30; ++k) {
    term = mul(term, z2) * (-1.0 / ((2 * k - 1) * (2 * k)));
    sum += term;
  }
  return sum;
}

constexpr int kTrig = 14;

inline Form1 trig_form(int level) {
  Form1 f;
  f.level = level;
  f.x_center = CdNum(level);
  f.y_center = CdNum(level);
  f.radius = 1.0;
  f.A = [](const CdNum& x, const CdNum& y, const CdNum& h) {
    const auto pw = powers(x, 2 * kTrig + 1);
    CdNum s(h.level());
    double fact = 1.0;
    for (int n = 0; n <= kTrig; ++n) {
      if (n) fact *= (2 * n) * (2 * n + 1);
      s += sandwich(pw, h, 2 * n) * ((n % 2 ? -1.0 : 1.0) / fact);
    }
    return s * cos_series(y);
  };
  f.B = [](const CdNum& x, const CdNum& y, const CdNum& v) {
    const auto pw = powers(y, 2 * kTrig);
    CdNum s(v.level());
    double fact = 1.0;
    for (int n = 1; n <= kTrig; ++n) {
      fact *= (2 * n - 1) * (2 * n);
      s += sandwich(pw, v, 2 * n - 1) * ((n % 2 ? -1.0 : 1.0) / fact);
    }
    return sin_series(x) * s;
  };
  return f;
}

}  // namespace fixtures
