#pragma once

#include <Eigen/Dense>

#include "algebra.hpp"

namespace octode {

/// Real-linear operator on A_r as a 2^r x 2^r matrix over coefficient vectors.
class LinOpR {
 public:
  LinOpR() = default;
  explicit LinOpR(int level) : level_(level), m_(Eigen::MatrixXd::Zero(dim_of(level), dim_of(level))) {}
  LinOpR(int level, Eigen::MatrixXd m) : level_(level), m_(std::move(m)) {
    if (m_.rows() != dim_of(level) || m_.cols() != dim_of(level))
      throw Error(ErrorCode::ShapeMismatch, "matrix size does not match level");
  }

  static LinOpR identity(int level) {
    return LinOpR(level, Eigen::MatrixXd::Identity(dim_of(level), dim_of(level)));
  }

  template <class F>
  static LinOpR from_columns(int level, F&& apply) {
    LinOpR op(level);
    for (int k = 0; k < dim_of(level); ++k) op.set_column(k, apply(CdNum::basis(level, k)));
    return op;
  }

  static LinOpR left_mul(const CdNum& a, int level) {
    return from_columns(level, [&](const CdNum& h) { return a.promoted(level) * h; });
  }
  static LinOpR right_mul(const CdNum& a, int level) {
    return from_columns(level, [&](const CdNum& h) { return h * a.promoted(level); });
  }
  static LinOpR conjugation(int level) { return from_columns(level, [](const CdNum& h) { return cd_conj(h); }); }

  int level() const { return level_; }
  const Eigen::MatrixXd& matrix() const { return m_; }
  Eigen::MatrixXd& matrix() { return m_; }

  void set_column(int k, const CdNum& v) {
    const CdNum w = v.promoted(std::max(v.level(), level_));
    for (int i = 0; i < dim_of(level_); ++i) m_(i, k) = w[i];
  }

  CdNum apply(const CdNum& h) const {
    const CdNum hp = h.promoted(std::max(h.level(), level_));
    Eigen::VectorXd v(dim_of(level_));
    for (int i = 0; i < dim_of(level_); ++i) v(i) = hp[i];
    Eigen::VectorXd w = m_ * v;
    return CdNum(level_, std::vector<double>(w.data(), w.data() + w.size()));
  }
  CdNum operator()(const CdNum& h) const { return apply(h); }

  LinOpR& operator+=(const LinOpR& o) {
    m_ += o.m_;
    return *this;
  }
  LinOpR& operator-=(const LinOpR& o) {
    m_ -= o.m_;
    return *this;
  }
  LinOpR& operator*=(double s) {
    m_ *= s;
    return *this;
  }

  /// (this o other)(h) = this(other(h))
  LinOpR compose(const LinOpR& o) const { return LinOpR(level_, m_ * o.m_); }

  bool invertible(double tol = 1e-12) const {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m_);
    lu.setThreshold(tol);
    return lu.isInvertible();
  }

  LinOpR inverse() const {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m_);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw Error(ErrorCode::NonInvertibleOperator, "operator is singular");
    return LinOpR(level_, lu.inverse());
  }

  CdNum solve(const CdNum& rhs) const {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m_);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw Error(ErrorCode::SingularJacobian, "operator is singular");
    const CdNum rp = rhs.promoted(std::max(rhs.level(), level_));
    Eigen::VectorXd b(dim_of(level_));
    for (int i = 0; i < dim_of(level_); ++i) b(i) = rp[i];
    Eigen::VectorXd x = lu.solve(b);
    return CdNum(level_, std::vector<double>(x.data(), x.data() + x.size()));
  }

  double max_abs_diff(const LinOpR& o) const { return (m_ - o.m_).cwiseAbs().maxCoeff(); }
  double max_abs() const { return m_.cwiseAbs().maxCoeff(); }

 private:
  int level_ = 0;
  Eigen::MatrixXd m_;
};

inline LinOpR operator+(LinOpR a, const LinOpR& b) { return a += b; }
inline LinOpR operator-(LinOpR a, const LinOpR& b) { return a -= b; }
inline LinOpR operator*(LinOpR a, double s) { return a *= s; }
inline LinOpR operator*(double s, LinOpR a) { return a *= s; }

}  // namespace octode
