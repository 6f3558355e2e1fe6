#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "algebra.hpp"
#include "path.hpp"

namespace octode {

/// z = modulus * exp(axis * angle), angle in [0, pi].
/// canonical_axis lies in S_r^+ and z = modulus * exp(canonical_axis * signed_angle).
struct PolarForm {
  double modulus = 0.0;
  CdNum axis;
  double angle = 0.0;
  bool axis_ambiguous = false;
  CdNum canonical_axis;
  double signed_angle = 0.0;
};

/// First nonzero imaginary component positive.
inline bool in_canonical_half(const CdNum& m, double tol = 0.0) {
  for (int k = 1; k < m.dim(); ++k) {
    if (m[k] > tol) return true;
    if (m[k] < -tol) return false;
  }
  return false;
}

inline PolarForm polar_decompose(const CdNum& z, const Context& ctx = default_context()) {
  const double mod = z.norm();
  if (mod <= ctx.tolerance) throw Error(ErrorCode::ZeroInput, "polar form of zero");
  PolarForm p;
  p.modulus = mod;
  p.angle = std::acos(std::clamp(z.re() / mod, -1.0, 1.0));
  const CdNum v = z.im();
  const double vn = v.norm();
  if (vn <= ctx.tolerance) {
    p.axis = CdNum::basis(z.level(), z.level() > 0 ? 1 : 0);
    p.axis_ambiguous = true;
    p.angle = z.re() > 0 ? 0.0 : std::numbers::pi;
  } else {
    p.axis = v / vn;
  }
  if (p.axis_ambiguous || in_canonical_half(p.axis)) {
    p.canonical_axis = p.axis;
    p.signed_angle = p.angle;
  } else {
    p.canonical_axis = -p.axis;
    p.signed_angle = -p.angle;
  }
  return p;
}

inline CdNum cd_exp(const CdNum& z) {
  const double er = std::exp(z.re());
  const CdNum v = z.im();
  const double vn = v.norm();
  CdNum out(z.level(), er * std::cos(vn));
  if (vn > 0.0) out += v * (er * std::sin(vn) / vn);
  return out;
}

struct LnResult {
  CdNum value;
  bool ambiguous = false;
};

inline LnResult cd_ln_principal_flagged(const CdNum& z, const Context& ctx = default_context()) {
  const PolarForm p = polar_decompose(z, ctx);
  return {CdNum(z.level(), std::log(p.modulus)) + p.axis * p.angle, p.axis_ambiguous};
}

inline CdNum cd_ln_principal(const CdNum& z, const Context& ctx = default_context()) {
  return cd_ln_principal_flagged(z, ctx).value;
}

inline CdNum cd_pow_int(const CdNum& z, int n) {
  CdNum out(z.level(), 1.0);
  for (int i = 0; i < n; ++i) out = cd_mul(out, z);
  return out;
}

inline CdNum cd_pow_real(const CdNum& z, double a, const Context& ctx = default_context()) {
  if (a >= 0.0 && a == std::floor(a) && a <= 64.0) return cd_pow_int(z, static_cast<int>(a));
  if (z.norm() <= ctx.tolerance) throw Error(ErrorCode::ZeroBase, "non-integer power of zero");
  return cd_exp(cd_ln_principal(z, ctx) * a);
}

struct RootSet {
  enum class Kind { PointPair, Sphere };
  Kind kind = Kind::PointPair;
  std::vector<CdNum> points;
  // Sphere: {center + radius * K : Re K = 0, |K| = 1}
  CdNum center;
  double radius = 0.0;

  CdNum sphere_point(const CdNum& unit_imaginary) const { return center + unit_imaginary * radius; }
};

inline RootSet sqrt_set(const CdNum& z, const Context& ctx = default_context()) {
  RootSet rs;
  const double mod = z.norm();
  if (mod <= ctx.tolerance) {
    rs.points = {CdNum(z.level())};
    return rs;
  }
  const double vn = z.im().norm();
  if (vn <= ctx.tolerance * std::max(1.0, mod)) {
    if (z.re() > 0) {
      const double s = std::sqrt(z.re());
      rs.points = {CdNum(z.level(), s), CdNum(z.level(), -s)};
    } else {
      rs.kind = RootSet::Kind::Sphere;
      rs.center = CdNum(z.level());
      rs.radius = std::sqrt(-z.re());
    }
    return rs;
  }
  const PolarForm p = polar_decompose(z, ctx);
  const CdNum w = cd_exp(p.axis * (p.angle / 2)) * std::sqrt(mod);
  rs.points = {w, -w};
  return rs;
}

inline double dot(const CdNum& a, const CdNum& b) {
  double s = 0.0;
  const int n = std::min(a.dim(), b.dim());
  for (int k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

namespace detail {

// Logarithm of w nearest to prev.
inline CdNum nearest_log(const CdNum& w, const CdNum& prev, const Context& ctx) {
  const double mod = w.norm();
  const double two_pi = 2 * std::numbers::pi;
  const CdNum pv = prev.im();
  const CdNum v = w.im();
  const double vn = v.norm();
  CdNum out(w.level(), std::log(mod));
  if (vn > ctx.tolerance * std::max(1.0, mod)) {
    const CdNum m = v / vn;
    const double phi = std::acos(std::clamp(w.re() / mod, -1.0, 1.0));
    const double k = std::round((dot(m, pv) - phi) / two_pi);
    out += m * (phi + two_pi * k);
    return out;
  }
  const double pn = pv.norm();
  const CdNum k_axis = pn > 0 ? pv / pn : CdNum::basis(w.level(), 1);
  if (w.re() > 0) {
    out += k_axis * (two_pi * std::round(pn / two_pi));
  } else {
    out += k_axis * (std::numbers::pi + two_pi * std::round((pn - std::numbers::pi) / two_pi));
  }
  return out;
}

inline CdNum continue_ln_step(const Path& path, double t0, const CdNum& v0, double t1, int depth,
                              const Context& ctx) {
  const CdNum w = path(t1);
  if (w.norm() <= ctx.tolerance) throw Error(ErrorCode::PathThroughZero, "path meets zero");
  CdNum v1 = nearest_log(w, v0, ctx);
  if ((v1 - v0).im().norm() <= std::numbers::pi / 2) return v1;
  if (depth >= 20) throw Error(ErrorCode::StepTooCoarse, "branch jump exceeds pi/2 after refinement");
  const double tm = 0.5 * (t0 + t1);
  const CdNum vm = continue_ln_step(path, t0, v0, tm, depth + 1, ctx);
  return continue_ln_step(path, tm, vm, t1, depth + 1, ctx);
}

}  // namespace detail

/// Nearest-value continuation of Ln along the path from start_branch at gamma(0).
inline CdNum continue_ln_along_path(const Path& path, const CdNum& start_branch, int samples_per_segment = 32,
                                    const Context& ctx = default_context()) {
  const CdNum w0 = path(0.0);
  if (w0.norm() <= ctx.tolerance) throw Error(ErrorCode::PathThroughZero, "path starts at zero");
  if ((cd_exp(start_branch) - w0).norm() > 1e-6 * std::max(1.0, w0.norm()))
    throw Error(ErrorCode::InvalidArgument, "start branch is not a logarithm of the path start");
  CdNum v = start_branch.promoted(std::max(start_branch.level(), path.level()));
  const int n = samples_per_segment * path.segments();
  for (int i = 1; i <= n; ++i) {
    v = detail::continue_ln_step(path, double(i - 1) / n, v, double(i) / n, 0, ctx);
  }
  return v;
}

}  // namespace octode
