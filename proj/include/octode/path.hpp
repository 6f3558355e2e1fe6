#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "algebra.hpp"

namespace octode {

/// Piecewise-linear path on [0,1], each segment taking an equal share of the parameter.
class Path {
 public:
  Path() = default;

  explicit Path(std::vector<CdNum> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw Error(ErrorCode::InvalidArgument, "path needs at least two nodes");
    int r = 0;
    for (const auto& n : nodes_) r = std::max(r, n.level());
    for (auto& n : nodes_) n = n.promoted(r);
    for (size_t i = 1; i < nodes_.size(); ++i)
      if ((nodes_[i] - nodes_[i - 1]).norm() == 0.0)
        throw Error(ErrorCode::InvalidArgument, "consecutive path nodes coincide");
  }

  static Path segment(const CdNum& a, const CdNum& b) { return Path({a, b}); }

  int level() const { return nodes_.front().level(); }
  int segments() const { return static_cast<int>(nodes_.size()) - 1; }
  const std::vector<CdNum>& nodes() const { return nodes_; }
  const CdNum& start() const { return nodes_.front(); }
  const CdNum& end() const { return nodes_.back(); }

  CdNum operator()(double t) const {
    auto [seg, u] = locate(t);
    return nodes_[seg] + (nodes_[seg + 1] - nodes_[seg]) * u;
  }

  /// d gamma / dt on the segment containing t.
  CdNum velocity(double t) const {
    auto [seg, u] = locate(t);
    (void)u;
    return (nodes_[seg + 1] - nodes_[seg]) * static_cast<double>(segments());
  }

  double length() const {
    double s = 0.0;
    for (size_t i = 1; i < nodes_.size(); ++i) s += (nodes_[i] - nodes_[i - 1]).norm();
    return s;
  }

 private:
  std::pair<int, double> locate(double t) const {
    const int m = segments();
    double x = std::clamp(t, 0.0, 1.0) * m;
    int seg = std::min(static_cast<int>(std::floor(x)), m - 1);
    return {seg, x - seg};
  }

  std::vector<CdNum> nodes_;
};

}  // namespace octode
