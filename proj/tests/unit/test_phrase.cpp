#include <gtest/gtest.h>

#include "octode/expression.hpp"
#include "octode/func.hpp"
#include "octode/phrase.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace octode;
using namespace fixtures;

namespace {
CdNum e(int level, int k) { return CdNum::basis(level, k); }

}  // namespace

TEST(Eval, Examples) {
  EXPECT_LT((parse_expression("z*conj(z)")(CdNum(2, {1, 1, 0, 0})) - CdNum(2, 2.0)).norm(), 1e-15);
  EXPECT_EQ(parse_expression("z^2")(e(2, 1)), CdNum(2, -1.0));
  EXPECT_EQ(parse_expression("e1*z*e2")(CdNum(2, 1.0)), e(2, 3));
}

TEST(Eval, FollowsTreeBracketing) {
  std::mt19937_64 rng(20);
  const Phrase p = parse_expression("e1*(z*(e2*z))");
  const Phrase q = parse_expression("((e1*z)*e2)*z");
  for (int i = 0; i < 10; ++i) {
    const CdNum z = oracle::random_cd(rng, 3);
    const CdNum e1 = e(3, 1), e2 = e(3, 2);
    EXPECT_LT((p(z) - oracle::mul(e1, oracle::mul(z, oracle::mul(e2, z)))).norm(), 1e-14);
    EXPECT_LT((q(z) - oracle::mul(oracle::mul(oracle::mul(e1, z), e2), z)).norm(), 1e-14);
  }
}

TEST(Diff, Examples) {
  std::mt19937_64 rng(21);
  const CdNum z = oracle::random_cd(rng, 3), h = e(3, 5);
  EXPECT_EQ(diff_phrase(Phrase::var(), Wrt::Z)(z, h), h);
  EXPECT_EQ(diff_phrase(Phrase::conj_var(), Wrt::Z)(z, h).norm(), 0.0);
  EXPECT_EQ(diff_phrase(parse_expression("z^2"), Wrt::Z)(e(2, 1), e(2, 2)).norm(), 0.0);
  // conj(z) differentiated in conj(z) feeds the conjugated direction
  EXPECT_EQ(diff_phrase(Phrase::conj_var(), Wrt::ZConj)(z, h), cd_conj(h));
}

TEST(Diff, OperatorIsRealLinear) {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 20; ++i) {
    const Phrase p = random_phrase(rng, 3, true);
    const OperatorPhrase d = derivative(p);
    const CdNum z = oracle::random_cd(rng, 3), h1 = oracle::random_cd(rng, 3), h2 = oracle::random_cd(rng, 3);
    const double a = 0.7, b = -1.3;
    EXPECT_LT((d(z, h1 * a + h2 * b) - d(z, h1) * a - d(z, h2) * b).norm(), 1e-10);
  }
}

TEST(Diff, FlattenMatchesFiniteDifferences) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 20; ++i) {
    const Phrase p = random_phrase(rng, 3, true);
    const CdNum z = oracle::random_cd(rng, 3);
    const LinOpR exact = derivative(p).flatten(z);
    const LinOpR fd = fd_jacobian(p, z, 1e-5 * std::max(1.0, z.norm()));
    const double scale = std::max(1.0, exact.matrix().norm());
    EXPECT_LT((exact.matrix() - fd.matrix()).norm(), 1e-6 * scale);
  }
}

TEST(Diff, LeibnizOnThreeFactors) {
  std::mt19937_64 rng(24);
  for (int i = 0; i < 20; ++i) {
    const Phrase a = random_phrase(rng, 3, true, 2, 2), b = random_phrase(rng, 3, true, 2, 2),
                 c = random_phrase(rng, 3, true, 2, 2);
    const Phrase prod = (a * b) * c;
    const CdNum z = oracle::random_cd(rng, 3), h = oracle::random_cd(rng, 3);
    const CdNum sum = (derivative(a)(z, h) * b(z)) * c(z) + (a(z) * derivative(b)(z, h)) * c(z) +
                      (a(z) * b(z)) * derivative(c)(z, h);
    EXPECT_LT((derivative(prod)(z, h) - sum).norm(), 1e-10 * std::max(1.0, sum.norm()));
  }
}

TEST(Diff, SecondDerivativeSymmetric) {
  std::mt19937_64 rng(25);
  for (int i = 0; i < 20; ++i) {
    const Phrase p = random_phrase(rng, 3, true);
    const OperatorPhrase d2 = derivative(derivative(p));
    const CdNum z = oracle::random_cd(rng, 3), h = oracle::random_cd(rng, 3), v = oracle::random_cd(rng, 3);
    EXPECT_LT((d2.eval(z, {h, v}) - d2.eval(z, {v, h})).norm(), 1e-9);
  }
}

TEST(Antiderivative, Examples) {
  const Phrase one = Phrase::real(1.0);
  const CdNum z = CdNum(3, {0.3, -0.2, 0.5, 0.1, 0.7, -0.4, 0.2, 0.6});
  EXPECT_EQ(antiderivative_left(one)(z), z);
  const Phrase g = antiderivative_left(parse_expression("e1*z*e2"));
  const CdNum ref = oracle::mul(oracle::mul(e(3, 1), oracle::mul(z, z) * 0.5), e(3, 2));
  EXPECT_LT((g(z) - ref).norm(), 1e-15);
  EXPECT_THROW(antiderivative_left(parse_expression("conj(z)")), Error);
  EXPECT_THROW(antiderivative_left(parse_expression("z*e1*z")), Error);
  try {
    antiderivative_left(LeftTerm{CdNum(2, 1.0), -1, CdNum(2, 1.0)});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NegativePowerOne);
  }
}

TEST(Antiderivative, DerivativeAlongOneRecoversIntegrand) {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 10; ++i) {
    Phrase p;
    for (int n = 0; n <= 5; ++n) {
      const NodePtr zn = n ? node::power(n) : node::constant(CdNum(0, 1.0));
      p.add_term(u(rng), zn);
      const NodePtr a = node::constant(oracle::random_cd(rng, 3)), b = node::constant(oracle::random_cd(rng, 3));
      p.add_term(1.0, node::mul(node::mul(a, zn), b));
    }
    const OperatorPhrase dg = derivative(antiderivative_left(p));
    for (int k = 0; k < 20; ++k) {
      const CdNum z = oracle::random_cd(rng, 3);
      EXPECT_LT((dg(z, CdNum(3, 1.0)) - p(z)).norm(), 1e-10 * std::max(1.0, p(z).norm()));
    }
  }
}

TEST(Compose, Examples) {
  std::mt19937_64 rng(27);
  const Phrase sq = parse_expression("z^2"), shift = parse_expression("z + 1");
  const Phrase c = compose_phrase(sq, shift);
  const Phrase cj = compose_phrase(Phrase::conj_var(), parse_expression("e1*z"));
  for (int i = 0; i < 10; ++i) {
    const CdNum z = oracle::random_cd(rng, 3);
    const CdNum w = z + 1.0;
    EXPECT_LT((c(z) - w * w).norm(), 1e-10);
    EXPECT_LT((cj(z) - cd_conj(e(3, 1) * z)).norm(), 1e-10);
  }
}

TEST(Compose, ChainRuleBothForms) {
  std::mt19937_64 rng(28);
  for (int i = 0; i < 50; ++i) {
    const Phrase outer = random_phrase(rng, 3, true, 2, 2), inner = random_phrase(rng, 3, true, 2, 2);
    const Phrase c = compose_phrase(outer, inner);
    const CdNum z = oracle::random_cd(rng, 3) * 0.8, h = oracle::random_cd(rng, 3);
    const CdNum y = inner(z), dpsi = derivative(inner)(z, h);
    const CdNum lhs = derivative(c)(z, h);
    EXPECT_LT((lhs - derivative(outer)(y, dpsi)).norm(), 1e-9 * std::max(1.0, lhs.norm()));
    // two-term form: D_y eta . (D psi h) + D_{conj y} eta . conj(D psi h), conj built into the slot
    const CdNum two = diff_phrase(outer, Wrt::Z)(y, dpsi) + diff_phrase(outer, Wrt::ZConj)(y, dpsi);
    EXPECT_LT((lhs - two).norm(), 1e-9 * std::max(1.0, lhs.norm()));
  }
}

TEST(Compose, HigherChainRuleOrdersTwoAndThree) {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 50; ++i) {
    const Phrase f = random_phrase(rng, 3, i % 2 == 0, 2, 3), g = random_phrase(rng, 3, i % 2 == 0, 2, 2);
    const Phrase c = compose_phrase(f, g);
    const CdNum z = oracle::random_cd(rng, 3) * 0.7;
    const CdNum h1 = oracle::random_cd(rng, 3), h2 = oracle::random_cd(rng, 3), h3 = oracle::random_cd(rng, 3);
    const OperatorPhrase f1 = derivative(f), f2 = derivative(f1), f3 = derivative(f2);
    const OperatorPhrase g1 = derivative(g), g2 = derivative(g1), g3 = derivative(g2);
    const CdNum y = g(z);
    const CdNum a1 = g1(z, h1), a2 = g1(z, h2), a3 = g1(z, h3);

    const CdNum lhs2 = derivative(derivative(c)).eval(z, {h1, h2});
    const CdNum rhs2 = f2.eval(y, {a1, a2}) + f1(y, g2.eval(z, {h1, h2}));
    EXPECT_LT((lhs2 - rhs2).norm(), 1e-8 * std::max(1.0, rhs2.norm()));

    const CdNum lhs3 = derivative(derivative(derivative(c))).eval(z, {h1, h2, h3});
    const CdNum rhs3 = f3.eval(y, {a1, a2, a3}) + f2.eval(y, {g2.eval(z, {h1, h2}), a3}) +
                       f2.eval(y, {g2.eval(z, {h1, h3}), a2}) + f2.eval(y, {a1, g2.eval(z, {h2, h3})}) +
                       f1(y, g3.eval(z, {h1, h2, h3}));
    EXPECT_LT((lhs3 - rhs3).norm(), 1e-8 * std::max(1.0, rhs3.norm()));
  }
}

TEST(Grammar, Examples) {
  const Phrase p = parse_expression("z^2 + e1*z*e2");
  ASSERT_EQ(p.terms().size(), 2u);
  const NodePtr& t = p.terms()[1].tree;
  ASSERT_EQ(t->kind, Node::Kind::Mul);
  EXPECT_EQ(t->right->kind, Node::Kind::Const);
  EXPECT_EQ(t->left->kind, Node::Kind::Mul);
  EXPECT_EQ(t->left->right->kind, Node::Kind::Var);

  const Phrase q = parse_expression("conj(z)*z");
  ASSERT_EQ(q.terms().size(), 1u);
  EXPECT_EQ(q.terms()[0].tree->left->kind, Node::Kind::ConjVar);

  const Phrase right = parse_expression("(e1*(z*e2))"), left = parse_expression("e1*z*e2");
  EXPECT_FALSE(right.structurally_equal(left));
  const CdNum z = e(3, 4);
  EXPECT_GT((right(z) - left(z)).norm(), 1.0);
}

TEST(Grammar, RoundTripAndErrors) {
  for (const char* s : {"z^2 + e1*z*e2", "(e1*(z*e2))", "conj(z)*z - 0.5*(1,2,3,4)*z^3", "e7*(z*e3)*conj(z)",
                        "2.5 - z", "(1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,1)*z"}) {
    const Phrase p = parse_expression(s);
    const Phrase back = parse_expression(print_phrase(p));
    EXPECT_TRUE(back.structurally_equal(p)) << s << " -> " << print_phrase(p);
  }
  auto code_of = [](const char* s) {
    try {
      parse_expression(s);
    } catch (const Error& err) {
      return err.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code_of("z +"), ErrorCode::SyntaxError);
  EXPECT_EQ(code_of("w*z"), ErrorCode::UnknownSymbol);
  EXPECT_EQ(code_of("e99"), ErrorCode::SyntaxError);
  EXPECT_EQ(code_of("z^"), ErrorCode::SyntaxError);
  try {
    parse_expression("z * * z");
  } catch (const Error& err) {
    EXPECT_NE(std::string(err.what()).find("position"), std::string::npos);
  }
}
