#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pgm/interpolation.hpp"
#include "pgm/polynomial.hpp"
#include "pgm/rational.hpp"
#include "pgm/spot_check.hpp"
#include "pgm/symbolic.hpp"

using namespace pgm;

namespace {

Polynomial poly(std::vector<int> c) {
  std::vector<Rational> r(c.begin(), c.end());
  return Polynomial(r);
}

using E = SymbolicExpr<Rational>;
using LC = LinearCombination<Rational>;
using VS = VectorSymbol;

}  // namespace

TEST(RationalParse, ExactOnly) {
  EXPECT_EQ(parse_rational("3"), Rational(3));
  EXPECT_EQ(parse_rational("-7/21"), Rational(-1, 3));
  EXPECT_EQ(parse_rational("10/4"), Rational(5, 2));
  for (const char* bad : {"0.1", "1e3", "", "1/0", "a/b", "1/", "/2", "1//2", "+-1"})
    EXPECT_THROW(parse_rational(bad), std::invalid_argument) << bad;
  EXPECT_EQ(to_string(Rational(6, 4)), "3/2");
  EXPECT_DOUBLE_EQ(to_double(Rational(1, 4)), 0.25);
}

TEST(PolynomialAlgebra, ArithmeticAndDivision) {
  const Polynomial p = poly({-1, 0, 1});  // x^2 - 1
  const Polynomial q = poly({1, 1});      // x + 1
  EXPECT_EQ(p.degree(), 2);
  EXPECT_EQ(p(Rational(3)), Rational(8));
  EXPECT_EQ(p.derivative(), poly({0, 2}));
  const auto [quot, rem] = divmod(p, q);
  EXPECT_EQ(quot, poly({-1, 1}));
  EXPECT_TRUE(rem.is_zero());
  EXPECT_EQ(gcd(p, poly({1, 2, 1})), q);
  EXPECT_TRUE((p - p).is_zero());
  EXPECT_EQ((p * q)(Rational(2)), p(Rational(2)) * q(Rational(2)));
  EXPECT_EQ(poly({2, 4}).monic(), Polynomial(std::vector<Rational>{Rational(1, 2), Rational(1)}));
}

TEST(PolynomialAlgebra, RandomRingLaws) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> c(-5, 5);
  auto random_poly = [&] { return poly({c(rng), c(rng), c(rng), c(rng)}); };
  for (int t = 0; t < 50; ++t) {
    const Polynomial a = random_poly(), b = random_poly(), d = random_poly();
    EXPECT_EQ(a * (b + d), a * b + a * d);
    EXPECT_EQ(a * b, b * a);
    if (!b.is_zero()) {
      const auto [qq, rr] = divmod(a, b);
      EXPECT_EQ(qq * b + rr, a);
      EXPECT_LT(rr.degree(), std::max(b.degree(), 1));
    }
  }
}

TEST(Sturm, RootCounts) {
  // (x - 1)(x - 2)(x - 3)
  const Polynomial p = poly({-6, 11, -6, 1});
  EXPECT_EQ(count_roots_open(p, Rational(0), Rational(4)), 3);
  EXPECT_EQ(count_roots_open(p, Rational(1), Rational(3)), 1);  // endpoints excluded
  EXPECT_EQ(count_roots_open(p, Rational(3, 2), Rational(5, 2)), 1);
  EXPECT_EQ(count_roots_open(poly({1, 0, 1}), Rational(-10), Rational(10)), 0);
  // Double root counted once.
  EXPECT_EQ(count_roots_open(poly({1, -2, 1}), Rational(0), Rational(2)), 1);
}

TEST(Sturm, NonnegOn) {
  const Polynomial sq = poly({1, -2, 1});  // (x-1)^2 touches zero
  EXPECT_TRUE(nonneg_on(sq, Rational(-3), Rational(3)));
  const Polynomial p = poly({-6, 11, -6, 1});
  EXPECT_TRUE(nonneg_on(p, Rational(1), Rational(2)));
  EXPECT_FALSE(nonneg_on(p, Rational(0), Rational(2)));
  EXPECT_FALSE(nonneg_on(p, Rational(2), Rational(3)));
  // Negative only on a tiny interval around 1/2.
  const Polynomial dip = poly({1, -4, 4}) - Polynomial(Rational(1, 1000000));
  EXPECT_FALSE(nonneg_on(dip, Rational(0), Rational(1)));
  EXPECT_TRUE(nonneg_on(dip, Rational(0), Rational(49, 100)));
  // Rational endpoints that are roots.
  EXPECT_TRUE(nonneg_on(poly({0, 1}) * poly({3, -1}), Rational(0), Rational(3)));
}

TEST(Sturm, RationalFunctionSigns) {
  const RationalFunction g = RationalFunction::x();
  const RationalFunction r = (RationalFunction(1) - g) / g;  // (1-g)/g
  EXPECT_TRUE(nonneg_on(r, Rational(0), Rational(1), false));
  EXPECT_FALSE(nonneg_on(r, Rational(0), Rational(1), true));  // pole at 0
  EXPECT_FALSE(nonneg_on(r, Rational(1, 2), Rational(2)));
  EXPECT_EQ(r(Rational(1, 4)), Rational(3));
  EXPECT_EQ((g * g) / g, g);  // normalized
}

TEST(Symbolic, InnerIsBilinearAndSymmetric) {
  const LC a = LC::of(VS::X) - Rational(2) * LC::of(VS::Gk);
  const LC b = Rational(3) * LC::of(VS::Gs) + LC::of(VS::X);
  const LC c = LC::of(VS::Sk1);
  EXPECT_EQ(inner(a, b), inner(b, a));
  EXPECT_EQ(inner(a + c, b), inner(a, b) + inner(c, b));
  EXPECT_EQ(inner(Rational(5) * a, b), Rational(5) * inner(a, b));
  const E s = sq_norm(a);
  EXPECT_EQ(s.at(VS::X, VS::X), Rational(1));
  EXPECT_EQ(s.at(VS::X, VS::Gk), Rational(-4));  // cross term carries both orderings
  EXPECT_EQ(s.at(VS::Gk, VS::Gk), Rational(4));
  EXPECT_EQ(detail::gram_index(2, 5), detail::gram_index(5, 2));
  EXPECT_EQ(kGramEntries, 36);
}

TEST(Symbolic, SubstitutionEliminatesRawSymbols) {
  const Rational gamma(1, 3);
  const E raw = sq_norm(LC::of(VS::Xk1)) + inner(LC::of(VS::Ss), LC::of(VS::X));
  EXPECT_FALSE(is_canonical(raw));
  const E sub = substitute(raw, gamma);
  EXPECT_TRUE(is_canonical(sub));
  // Same value on a consistent numeric assignment.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Assignment a = catalog_assignment(0.5, 3.0, to_double(gamma), seed);
    EXPECT_NEAR(evaluate(raw, a), evaluate(sub, a), 1e-9 * (1.0 + std::abs(evaluate(raw, a))));
  }
}

TEST(Interpolation, RegressionConstants) {
  // Coefficient of <Gk, Gk> in the (*, k) smooth inequality at mu = 1, L = 2:
  // -1/(2L) - mu/(2(1 - mu/L)) / L^2 = -1/2.
  const E e = interp_smooth<Rational>(PointLabel::Star, PointLabel::K, Rational(1), Rational(2), Rational(1, 2));
  EXPECT_EQ(e.at(VS::Gk, VS::Gk), Rational(-1, 2));
  EXPECT_EQ(e.at(ScalarSymbol::Fs), Rational(1));
  EXPECT_EQ(e.at(ScalarSymbol::Fk), Rational(-1));
  EXPECT_TRUE(is_canonical(e));
  EXPECT_TRUE(interp_smooth<Rational>(PointLabel::K, PointLabel::K, Rational(1), Rational(2), Rational(1)).is_zero());
  EXPECT_THROW(interp_smooth<Rational>(PointLabel::K, PointLabel::Star, Rational(2), Rational(2), Rational(1)),
               std::invalid_argument);
  const E h = interp_convex<Rational>(PointLabel::K1, PointLabel::Star, Rational(1, 2));
  EXPECT_EQ(h.at(ScalarSymbol::Hk1), Rational(1));
  // -<s_*, x_{k+1}> = <g_*, X - (Gk + Sk1)/2>.
  EXPECT_EQ(h.at(VS::Gs, VS::X), Rational(1));
  EXPECT_EQ(h.at(VS::Gs, VS::Gk), Rational(-1, 2));
}

TEST(Interpolation, NonnegativeOnCatalogInstances) {
  const std::vector<PointLabel> labels{PointLabel::K, PointLabel::K1, PointLabel::Star};
  const Rational mu(1, 2), L(3);
  for (const Rational& gamma : {Rational(1, 10), Rational(1, 3), Rational(1, 2)}) {
    for (PointLabel i : labels)
      for (PointLabel j : labels) {
        if (i == j) continue;
        const double lo_s = numeric_min_value(interp_smooth<Rational>(i, j, mu, L, gamma), 0.5, 3.0,
                                              to_double(gamma), 50, 7);
        const double lo_c = numeric_min_value(interp_convex<Rational>(i, j, gamma), 0.5, 3.0,
                                              to_double(gamma), 50, 7);
        EXPECT_GE(lo_s, -1e-9);
        EXPECT_GE(lo_c, -1e-9);
      }
  }
}
