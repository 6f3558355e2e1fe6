#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "context.hpp"
#include "error.hpp"

namespace octode {

inline constexpr int kMaxLevel = 4;
inline constexpr int kMaxDim = 1 << kMaxLevel;

inline constexpr int dim_of(int level) { return 1 << level; }

struct SignedBasis {
  int sign = 1;
  int index = 0;
  bool operator==(const SignedBasis&) const = default;
};

namespace detail {

struct BasisTable {
  // entry[j][k] for i_j * i_k at a fixed level
  std::array<std::array<SignedBasis, kMaxDim>, kMaxDim> entry{};
};

// (xi, eta)(gamma, delta) = (xi gamma - conj(delta) eta, delta xi + eta conj(gamma))
inline std::array<BasisTable, kMaxLevel + 1> build_tables() {
  std::array<BasisTable, kMaxLevel + 1> t{};
  t[0].entry[0][0] = {1, 0};
  for (int r = 1; r <= kMaxLevel; ++r) {
    const int n = dim_of(r);
    const int h = n / 2;
    const auto& lo = t[r - 1].entry;
    auto conj_sign = [](int idx) { return idx == 0 ? 1 : -1; };
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        SignedBasis out;
        if (j < h && k < h) {
          out = lo[j][k];
        } else if (j < h) {
          // (i_j,0)(0,i_m) = (0, i_m i_j)
          const auto p = lo[k - h][j];
          out = {p.sign, p.index + h};
        } else if (k < h) {
          // (0,i_m)(i_k,0) = (0, i_m conj(i_k))
          const auto p = lo[j - h][k];
          out = {p.sign * conj_sign(k), p.index + h};
        } else {
          // (0,i_m)(0,i_n) = (-conj(i_n) i_m, 0)
          const auto p = lo[k - h][j - h];
          out = {-p.sign * conj_sign(k - h), p.index};
        }
        t[r].entry[j][k] = out;
      }
    }
  }
  return t;
}

inline const std::array<BasisTable, kMaxLevel + 1>& tables() {
  static const auto t = build_tables();
  return t;
}

inline void check_level(int level) {
  if (level < 0 || level > kMaxLevel)
    throw Error(ErrorCode::InvalidLevel, "level " + std::to_string(level) + " outside [0,4]");
}

}  // namespace detail

inline SignedBasis basis_product(int level, int j, int k) {
  detail::check_level(level);
  const int n = dim_of(level);
  if (j < 0 || j >= n || k < 0 || k >= n)
    throw Error(ErrorCode::InvalidArgument, "basis index out of range");
  return detail::tables()[level].entry[j][k];
}

/// Cayley-Dickson number of level r with 2^r real coefficients.
class CdNum {
 public:
  CdNum() = default;

  explicit CdNum(int level) : level_(level) { detail::check_level(level); }

  CdNum(int level, double re) : CdNum(level) {
    set(0, re);
  }

  CdNum(int level, const std::vector<double>& coeffs) : CdNum(level) {
    if (static_cast<int>(coeffs.size()) != dim())
      throw Error(ErrorCode::ShapeMismatch, "coefficient count does not match level");
    for (int k = 0; k < dim(); ++k) set(k, coeffs[k]);
  }

  CdNum(int level, std::initializer_list<double> coeffs)
      : CdNum(level, std::vector<double>(coeffs)) {}

  static CdNum basis(int level, int k, double scale = 1.0) {
    CdNum z(level);
    if (k < 0 || k >= z.dim()) throw Error(ErrorCode::InvalidArgument, "basis index out of range");
    z.set(k, scale);
    return z;
  }

  int level() const { return level_; }
  int dim() const { return dim_of(level_); }

  double operator[](int k) const { return c_[k]; }
  double re() const { return c_[0]; }

  void set(int k, double v) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite coefficient");
    c_[k] = v;
  }

  std::vector<double> coeffs() const { return {c_.begin(), c_.begin() + dim()}; }

  /// Zero-padding embedding into a higher level.
  CdNum promoted(int level) const {
    if (level < level_) throw Error(ErrorCode::LevelMismatch, "cannot demote");
    CdNum z(level);
    z.c_ = c_;
    return z;
  }

  CdNum im() const {
    CdNum z = *this;
    z.c_[0] = 0.0;
    return z;
  }

  double norm2() const {
    double s = 0.0;
    for (int k = 0; k < dim(); ++k) s += c_[k] * c_[k];
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }

  bool is_real(double tol) const { return im().norm() <= tol; }

  CdNum operator-() const {
    CdNum z = *this;
    for (int k = 0; k < dim(); ++k) z.c_[k] = -z.c_[k];
    return z;
  }

  CdNum& operator+=(const CdNum& o) { return axpy(1.0, o); }
  CdNum& operator-=(const CdNum& o) { return axpy(-1.0, o); }

  CdNum& operator*=(double s) {
    for (int k = 0; k < dim(); ++k) set(k, c_[k] * s);
    return *this;
  }

  CdNum& axpy(double s, const CdNum& o) {
    if (o.level_ > level_) *this = promoted(o.level_);
    for (int k = 0; k < o.dim(); ++k) set(k, c_[k] + s * o.c_[k]);
    return *this;
  }

  bool operator==(const CdNum& o) const {
    if (level_ != o.level_) return false;
    for (int k = 0; k < dim(); ++k)
      if (c_[k] != o.c_[k]) return false;
    return true;
  }

  friend CdNum cd_mul(const CdNum& a, const CdNum& b);

 private:
  int level_ = 0;
  std::array<double, kMaxDim> c_{};
};

inline CdNum operator+(CdNum a, const CdNum& b) { return a += b; }
inline CdNum operator-(CdNum a, const CdNum& b) { return a -= b; }
inline CdNum operator*(CdNum a, double s) { return a *= s; }
inline CdNum operator*(double s, CdNum a) { return a *= s; }
inline CdNum operator/(CdNum a, double s) { return a *= (1.0 / s); }

inline CdNum operator+(CdNum a, double s) {
  a.set(0, a.re() + s);
  return a;
}
inline CdNum operator+(double s, CdNum a) { return a + s; }
inline CdNum operator-(CdNum a, double s) { return a + (-s); }
inline CdNum operator-(double s, const CdNum& a) { return (-a) + s; }

/// Strict product: both operands must share a level.
inline CdNum cd_mul(const CdNum& a, const CdNum& b) {
  if (a.level_ != b.level_) throw Error(ErrorCode::LevelMismatch, "cd_mul operands differ in level");
  const auto& t = detail::tables()[a.level_].entry;
  const int n = a.dim();
  std::array<double, kMaxDim> acc{};
  for (int j = 0; j < n; ++j) {
    const double aj = a.c_[j];
    if (aj == 0.0) continue;
    for (int k = 0; k < n; ++k) {
      const double bk = b.c_[k];
      if (bk == 0.0) continue;
      const auto& p = t[j][k];
      acc[p.index] += p.sign * aj * bk;
    }
  }
  CdNum out(a.level_);
  for (int k = 0; k < n; ++k) out.set(k, acc[k]);
  return out;
}

inline int common_level(const CdNum& a, const CdNum& b) { return std::max(a.level(), b.level()); }

/// Promoting product; use cd_mul for the strict version.
inline CdNum operator*(const CdNum& a, const CdNum& b) {
  const int r = common_level(a, b);
  return cd_mul(a.promoted(r), b.promoted(r));
}

inline CdNum cd_conj(const CdNum& a) {
  CdNum z = -a;
  z.set(0, a.re());
  return z;
}

inline CdNum cd_inv(const CdNum& a, const Context& ctx = default_context()) {
  const double n2 = a.norm2();
  if (std::sqrt(n2) <= ctx.tolerance) throw Error(ErrorCode::ZeroOrNearZero, "inverse of near-zero number");
  return cd_conj(a) / n2;
}

struct InverseResult {
  CdNum value;
  bool verified = false;  // a * value == 1 within tolerance
};

inline InverseResult cd_inv_checked(const CdNum& a, const Context& ctx = default_context()) {
  InverseResult r{cd_inv(a, ctx)};
  CdNum one(a.level(), 1.0);
  r.verified = (cd_mul(a, r.value) - one).norm() <= 1e3 * ctx.tolerance;
  return r;
}

/// Real coordinate j recovered through products with basis units only.
inline double coord_extract(const CdNum& z, int j) {
  const int r = z.level();
  if (r < 2) throw Error(ErrorCode::InvalidLevel, "coord_extract needs level >= 2");
  const int n = z.dim();
  if (j < 0 || j >= n) throw Error(ErrorCode::InvalidArgument, "coordinate index out of range");
  CdNum bracket = -z;
  for (int k = 1; k < n; ++k) {
    const CdNum ik = CdNum::basis(r, k);
    bracket += cd_mul(ik, cd_mul(z, cd_conj(ik)));
  }
  bracket *= 1.0 / (n - 2);
  CdNum out;
  if (j == 0) {
    out = (z + bracket) * 0.5;
  } else {
    const CdNum ij = CdNum::basis(r, j);
    out = (cd_mul(-z, ij) + cd_mul(ij, bracket)) * 0.5;
  }
  return out.re();
}

inline CdNum commutator(const CdNum& a, const CdNum& b) { return a * b - b * a; }
inline CdNum associator(const CdNum& a, const CdNum& b, const CdNum& c) {
  return (a * b) * c - a * (b * c);
}

inline std::string format_double(double v, int digits = 17) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

/// "a0 + a1*e1 + ..." with zero terms dropped.
inline std::string to_string(const CdNum& z, int digits = 12) {
  std::string s;
  bool first = true;
  for (int k = 0; k < z.dim(); ++k) {
    double v = z[k];
    if (v == 0.0) continue;
    if (!first) {
      s += v < 0 ? " - " : " + ";
      v = std::abs(v);
    }
    s += format_double(v, digits);
    if (k > 0) s += "*e" + std::to_string(k);
    first = false;
  }
  return first ? "0" : s;
}

inline std::string to_tuple_string(const CdNum& z, int digits = 17) {
  std::string s = "(";
  for (int k = 0; k < z.dim(); ++k) {
    if (k) s += ",";
    s += format_double(z[k], digits);
  }
  return s + ")";
}

inline std::ostream& operator<<(std::ostream& os, const CdNum& z) { return os << to_string(z); }

}  // namespace octode
