#pragma once

#include <functional>
#include <memory>
#include <string>

#include "expression.hpp"
#include "linop.hpp"
#include "phrase.hpp"

namespace octode {

using ScalarMap = std::function<CdNum(const CdNum&)>;
using JacobianMap = std::function<LinOpR(const CdNum&)>;

/// Central differences column by column, step 1e-5 * max(1, |z|) unless given.
inline LinOpR fd_jacobian(const ScalarMap& f, const CdNum& z, double step = 0.0) {
  const double eps = step > 0 ? step : 1e-5 * std::max(1.0, z.norm());
  const CdNum f0 = f(z);
  const int r = std::max(z.level(), f0.level());
  const CdNum zp = z.promoted(r);
  return LinOpR::from_columns(r, [&](const CdNum& e) {
    return (f(zp + e * eps) - f(zp - e * eps)) / (2 * eps);
  });
}

/// Evaluatable function of one Cayley-Dickson variable: a phrase or a native callable.
class Func {
 public:
  Func() : Func(Phrase::zero()) {}

  Func(const Phrase& p) : phrase_(std::make_shared<Phrase>(p)), label_(print_phrase(p)) {  // NOLINT
    auto ph = phrase_;
    f_ = [ph](const CdNum& z) { return ph->eval(z); };
    auto d = std::make_shared<OperatorPhrase>(octode::derivative(*ph));
    df_ = [d](const CdNum& z) { return d->flatten(z); };
  }

  Func(ScalarMap f, std::string label, JacobianMap df = {})
      : f_(std::move(f)), df_(std::move(df)), label_(std::move(label)) {}

  static Func parse(const std::string& text) { return Func(parse_expression(text)); }
  static Func constant(const CdNum& c) { return Func(Phrase::constant(c)); }

  CdNum operator()(const CdNum& z) const { return f_(z); }

  /// Exact for phrases or when a Jacobian was supplied, finite differences otherwise.
  LinOpR derivative(const CdNum& z) const {
    if (df_) return df_(z);
    return fd_jacobian(f_, z);
  }

  bool has_exact_derivative() const { return static_cast<bool>(df_); }
  const Phrase* phrase() const { return phrase_.get(); }
  const std::string& label() const { return label_; }
  const ScalarMap& map() const { return f_; }

 private:
  ScalarMap f_;
  JacobianMap df_;
  std::shared_ptr<const Phrase> phrase_;
  std::string label_;
};

inline LinOpR frechet_derivative(const Func& f, const CdNum& z) {
  try {
    return f.derivative(z);
  } catch (const Error& e) {
    throw Error(ErrorCode::EvaluationFailure, e.what());
  }
}

}  // namespace octode
