#include <gtest/gtest.h>

#include "octode/odes.hpp"
#include "octode/series.hpp"
#include "oracles.hpp"

using namespace octode;

namespace {
SeriesInitial constant_initial(const CdNum& c, int order) {
  return [c, order](const std::vector<MSeries>&) { return MSeries::constant(c, 1, order); };
}

CauchyProblem exp_problem(int order, double rate = 1.0) {
  CauchyProblem p;
  p.rhs.push_back([rate](const SeriesArgs& a) { return a.u[0] * rate; });
  p.initial.push_back(constant_initial(CdNum(2, 1.0), order));
  return p;
}

double factorial(int n) { return n ? n * factorial(n - 1) : 1.0; }

// constant-coefficient linear system over quaternions:
// [dy/dx].(h0 + h1 e1) + b y = Q, y = eta on Re x = t0, expanded around x = t0 with t = Re x - t0, x1 = e1 part
struct LinearCase {
  double h0 = 1, h1 = 0.5, b = 0.7, t0 = 0.2;
  CdNum Q = CdNum(2, {0.3, 0.1, 0, 0});
  Func eta = Func::parse("z*z");

  CauchyProblem cauchy() const {
    CauchyProblem q;
    q.spatial = 1;
    q.t0 = t0;
    const double H0 = h0, H1 = h1, B = b;
    const CdNum QQ = Q;
    q.rhs.push_back([=](const SeriesArgs& a) {
      MSeries r = MSeries::constant(QQ, 2, a.u[0].order()) - a.u[0] * B - a.ux[0][0] * H1;
      return r * (1.0 / H0);
    });
    const Phrase* e = eta.phrase();
    q.initial.push_back([e](const std::vector<MSeries>& x) { return compose(*e, x[0] * CdNum::basis(2, 1)); });
    return q;
  }
  Solution closed() const {
    return solve_linear(LinearProblem{Func::constant(CdNum(0, b)), Func::constant(Q),
                                      Func::constant(CdNum(2, {h0, h1, 0, 0})), boundary(t0, eta)});
  }
};
}  // namespace

TEST(CauchySeries, ExponentialCoefficients) {
  const auto s = cauchy_series_solve(exp_problem(14), 14);
  for (int n = 0; n <= 12; ++n) EXPECT_NEAR(s.u[0].coeff(n).re(), 1.0 / factorial(n), 1e-12) << n;
  for (int n = 0; n <= 12; ++n) EXPECT_LT(s.u[0].coeff(n).im().norm(), 1e-15);
  EXPECT_LT(s.residual_max, 1e-9);
  EXPECT_GT(s.radius, 1.0);
}

TEST(CauchySeries, PolynomialForcing) {
  CauchyProblem p;
  p.rhs.push_back([](const SeriesArgs& a) { return a.t; });
  p.initial.push_back(constant_initial(CdNum(2), 10));
  const auto s = cauchy_series_solve(p, 10);
  EXPECT_NEAR(s.u[0].coeff(2).re(), 0.5, 1e-15);
  for (int n = 0; n <= 10; ++n)
    if (n != 2) EXPECT_LT(s.u[0].coeff(n).norm(), 1e-14) << n;
}

TEST(CauchySeries, CosineThroughReduction) {
  HighOrderSystem h;
  h.orders = {2};
  h.rhs.push_back([](const SeriesArgs& a) { return a.u[0] * -1.0; });
  h.initial.push_back({constant_initial(CdNum(2, 1.0), 16), constant_initial(CdNum(2), 16)});
  const CauchyProblem p = reduce_to_first_order(h);
  EXPECT_EQ(p.unknowns, 2);
  const auto s = cauchy_series_solve(p, 16);
  for (int k = 0; 2 * k <= 16; ++k) EXPECT_NEAR(s.u[0].coeff(2 * k).re(), (k % 2 ? -1.0 : 1.0) / factorial(2 * k), 1e-12);
  for (int k = 0; 2 * k + 1 <= 16; ++k) EXPECT_LT(s.u[0].coeff(2 * k + 1).norm(), 1e-15);
}

TEST(CauchySeries, ReductionIdentityAndTripleIntegral) {
  HighOrderSystem one;
  one.orders = {1};
  one.rhs.push_back([](const SeriesArgs& a) { return a.u[0]; });
  one.initial.push_back({constant_initial(CdNum(2, 1.0), 10)});
  const CauchyProblem p1 = reduce_to_first_order(one);
  EXPECT_EQ(p1.unknowns, 1);
  const auto a = cauchy_series_solve(p1, 10), b = cauchy_series_solve(exp_problem(10), 10);
  for (int n = 0; n <= 10; ++n) EXPECT_EQ(a.u[0].coeff(n), b.u[0].coeff(n));

  HighOrderSystem h;
  h.orders = {3};
  h.rhs.push_back([](const SeriesArgs& a) { return a.t * 0.0; });
  h.initial.push_back({constant_initial(CdNum(2), 8), constant_initial(CdNum(2), 8), constant_initial(CdNum(2, 2.0), 8)});
  const auto s = cauchy_series_solve(reduce_to_first_order(h), 8);
  for (double t : {0.1, 0.5, 0.9}) EXPECT_NEAR(s(0, t).re(), t * t, 1e-15);
  EXPECT_NEAR(s.u[0].coeff(2).re(), 1.0, 1e-15);
}

TEST(CauchySeries, OrderingDoesNotChangeCoefficients) {
  const LinearCase lc;
  const auto f = cauchy_series_solve(lc.cauchy(), 10, SeriesOrdering::Forward);
  const auto r = cauchy_series_solve(lc.cauchy(), 10, SeriesOrdering::Reverse);
  double worst = 0;
  for (int a = 0; a <= 10; ++a)
    for (int b = 0; b <= 10; ++b) worst = std::max(worst, (f.u[0].coeff(a, b) - r.u[0].coeff(a, b)).norm());
  EXPECT_LT(worst, 1e-13);
  HighOrderSystem h;
  h.orders = {2};
  h.rhs.push_back([](const SeriesArgs& a) { return a.u[0] * -1.0 + a.u[1] * a.u[1]; });
  h.initial.push_back({constant_initial(CdNum(2, {0.5, 0.1, 0, 0}), 10), constant_initial(CdNum(2, {0, 0, 0.3, 0}), 10)});
  const auto g = cauchy_series_solve(reduce_to_first_order(h), 10, SeriesOrdering::Forward);
  const auto k = cauchy_series_solve(reduce_to_first_order(h), 10, SeriesOrdering::Reverse);
  for (int n = 0; n <= 10; ++n) EXPECT_LT((g.u[0].coeff(n) - k.u[0].coeff(n)).norm(), 1e-13);
}

TEST(CauchySeries, ResidualShrinksWithOrder) {
  // residual at fixed interior points, u' = u^2 + t, u(0) = 0.3
  CauchyProblem p;
  p.rhs.push_back([](const SeriesArgs& a) { return a.u[0] * a.u[0] + a.t; });
  auto residual_at = [&](int N) {
    p.initial = {constant_initial(CdNum(2, 0.3), N)};
    const auto s = cauchy_series_solve(p, N);
    double m = 0;
    const MSeries du = s.u[0].derivative(0);
    for (double t : {0.05, 0.1, 0.15}) {
      const CdNum d = du({t, 0, 0});
      const CdNum u = s(0, t);
      m = std::max(m, (d - (u * u + t)).norm());
    }
    return m;
  };
  double prev = INFINITY;
  for (int N = 4; N <= 12; ++N) {
    const double r = residual_at(N);
    EXPECT_LE(r, std::max(prev, 1e-14)) << N;
    prev = r;
  }
  EXPECT_LT(prev, 1e-8);
}

TEST(CauchySeries, AgreesWithLinearSolver) {
  const LinearCase lc;
  const auto s = cauchy_series_solve(lc.cauchy(), 14);
  const auto sl = lc.closed();
  const double reach = std::min(0.5 * s.radius, 0.5);
  ASSERT_GT(reach, 0.1);
  int n = 0;
  for (double t : {0.2, 0.5, 0.8, 1.0})
    for (double x1 : {-0.1, 0.05, 0.1}) {
      if (n == 10) break;
      const double tt = t * reach * 0.9, xx = x1 * reach;
      EXPECT_LT((s(0, tt, xx) - sl(CdNum(2, {lc.t0 + tt, xx, 0, 0}))).norm(), 1e-6);
      ++n;
    }
}

TEST(CauchySeries, Errors) {
  try {
    cauchy_series_solve(exp_problem(12, 1e8), 12);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::RecursionBlowup);
  }
  CauchyProblem p = exp_problem(8);
  p.rhs[0] = [](const SeriesArgs&) -> MSeries { throw Error(ErrorCode::ZeroInput, "pole"); };
  try {
    cauchy_series_solve(p, 8);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NonAnalyticInput);
  }
}
