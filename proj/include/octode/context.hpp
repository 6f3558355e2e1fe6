#pragma once

#include <cstdlib>
#include <string>

namespace octode {

/// Numerical context threaded through operations that compare against zero.
struct Context {
  double tolerance = 1e-9;
};

namespace detail {
inline double read_env_tolerance() {
  if (const char* env = std::getenv("OCTODE_TOLERANCE")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && v > 0.0) return v;
  }
  return 1e-9;
}
}  // namespace detail

/// Process-wide default; OCTODE_TOLERANCE is read once on first use.
inline const Context& default_context() {
  static const Context ctx{detail::read_env_tolerance()};
  return ctx;
}

}  // namespace octode
