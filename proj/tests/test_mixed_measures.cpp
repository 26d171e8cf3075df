#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pgm/mixed_measures.hpp"
#include "pgm/worstcase_gen.hpp"

using namespace pgm;

namespace {

CompositeProblem lasso_like(std::uint64_t seed, double mu = 0.5, double L = 4.0) {
  return CompositeProblem(random_instance(ClassParams(mu, L), 4, seed), ProxFunction::l1(0.3, 4));
}

IterateTrace lasso_run(std::uint64_t seed, double gamma, int N, bool with_s0 = true) {
  auto problem = lasso_like(seed);
  const Vector x0 = Vector::LinSpaced(4, -2.0, 3.0);
  RunOptions opt;
  if (with_s0) opt.s0 = closest_subgradient(problem.h, x0, -eval_grad(problem.f, x0).grad);
  return run(std::move(problem), gamma, x0, N, opt);
}

}  // namespace

TEST(Proposition, EqualityOnScaledSquaredNorm) {
  // f = mu/2 |x|^2, h = 0: all three inequalities are equalities.
  const ClassParams p(2.0, 5.0);
  const MeasureTriple t{3.0, 3.0, 12.0};
  const auto slacks = check_proposition(t, p);
  ASSERT_EQ(slacks.size(), 3u);
  EXPECT_EQ(slacks[0].id, "i");
  EXPECT_EQ(slacks[1].id, "ii");
  EXPECT_EQ(slacks[2].id, "iii");
  for (const auto& s : slacks) EXPECT_NEAR(s.normalized(), 0.0, 1e-15) << s.id;
}

TEST(Proposition, HoldsAlongCompositeRuns) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto trace = lasso_run(seed, 0.3, 15);
    for (std::size_t k = 0; k < trace.records.size(); ++k) {
      const auto t = MeasureTriple::from_record(trace.records[k]);
      double floor = 0.0;
      for (Measure m : kAllMeasures) floor = std::max(floor, 1e-12 * roundoff_scale(trace, k, m));
      for (const auto& s : check_proposition(t, trace.problem.params(), floor))
        EXPECT_GE(s.slack, -floor - 1e-12 * s.scale) << "seed " << seed << " k " << k << " " << s.id;
    }
  }
}

TEST(Proposition, Rejections) {
  EXPECT_THROW(check_proposition({1.0, 1.0, 1.0}, ClassParams(0.0, 1.0)), std::domain_error);
  IterateRecord r;
  r.dist_sq = 1.0;
  EXPECT_THROW(MeasureTriple::from_record(r), std::invalid_argument);
}

TEST(MixedBound, TightOnQuadraticLowerBound) {
  const ClassParams p(1.0, 10.0);
  for (double gamma : {0.05, 2.0 / 11.0, 0.19}) {
    const auto spec = quadratic_lower_bound(p, gamma, 3, 4);
    const auto trace = run(spec.problem, gamma, spec.x0, 4, RunOptions{spec.s0});
    for (Measure m : kAllMeasures) {
      const auto s = check_mixed_bound(trace, m, m, 4);
      EXPECT_NEAR(s.normalized(), 0.0, 1e-12) << gamma;
    }
  }
}

TEST(MixedBound, NonnegativeSlackOnRandomRuns) {
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    for (double gamma : {0.1, 0.25, 0.4, 0.5}) {
      const auto trace = lasso_run(seed, gamma, 6);
      for (Measure i : kAllMeasures)
        for (Measure f : kAllMeasures) {
          const bool star = i != f && (i == Measure::DistanceSq ||
                                       (i == Measure::FuncGap && f == Measure::ResidualGradSq));
          if (star) {
            EXPECT_THROW(check_mixed_bound(trace, i, f, 6), NoKnownBound);
            continue;
          }
          const auto s = check_mixed_bound(trace, i, f, 6);
          const double floor = 1e-12 * roundoff_scale(trace, 6, f);
          EXPECT_GE(s.slack, -floor - 1e-12 * s.scale) << to_string(i) << "->" << to_string(f);
        }
    }
}

TEST(MixedBound, ConjecturedCellTightOnShiftedQuadratic) {
  const ClassParams p(1.0, 2.0);
  const auto spec = appendix_b_instance(p, 3, 1.0, ShiftedQuadraticTarget::DistToFuncGap);
  const auto trace = run(spec.problem, 0.5, spec.x0, 3, RunOptions{spec.s0});
  const auto s = check_mixed_bound(trace, Measure::DistanceSq, Measure::FuncGap, 3, true);
  EXPECT_EQ(s.bound.provenance, Provenance::ConjecturedTight);
  EXPECT_NEAR(s.normalized(), 0.0, 1e-12);
}

TEST(MixedBound, UnboundedCellHasInfiniteSlack) {
  const auto spec = unbounded_family(0.05, 1.0, 5, 1.0);
  const auto trace = run(spec.problem, 1.0, spec.x0, 5, RunOptions{spec.s0});
  const auto s = check_mixed_bound(trace, Measure::FuncGap, Measure::DistanceSq, 5);
  EXPECT_TRUE(s.bound.unbounded);
  EXPECT_TRUE(std::isinf(s.slack));
  EXPECT_GT(s.normalized(), 0.0);
}

TEST(MixedBound, Rejections) {
  const auto trace = lasso_run(1, 0.25, 3);
  EXPECT_THROW(check_mixed_bound(trace, Measure::DistanceSq, Measure::DistanceSq, 0), std::invalid_argument);
  EXPECT_THROW(check_mixed_bound(trace, Measure::DistanceSq, Measure::DistanceSq, 4), std::invalid_argument);

  const auto no_s0 = lasso_run(1, 0.25, 3, false);
  EXPECT_THROW(check_mixed_bound(no_s0, Measure::ResidualGradSq, Measure::DistanceSq, 3), std::invalid_argument);
  EXPECT_NO_THROW(check_mixed_bound(no_s0, Measure::DistanceSq, Measure::DistanceSq, 3));

  const auto large = lasso_run(1, 0.6, 3);  // 2/L = 0.5
  EXPECT_THROW(check_mixed_bound(large, Measure::DistanceSq, Measure::DistanceSq, 3), std::domain_error);

  const auto els = run_exact_line_search(lasso_like(2), Vector::LinSpaced(4, -2.0, 3.0), 4);
  ASSERT_FALSE(els.constant_step());
  EXPECT_THROW(check_mixed_bound(els, Measure::FuncGap, Measure::FuncGap, 4), std::invalid_argument);
}

TEST(PerStep, ContractionAtRateAndViolationBelowIt) {
  const ClassParams p(1.0, 10.0);
  const double gamma = 0.15;
  const auto spec = quadratic_lower_bound(p, gamma, 3, 6);
  const auto trace = run(spec.problem, gamma, spec.x0, 6, RunOptions{spec.s0});
  const double r2 = rho(p, gamma).rho_squared;
  const auto ok = per_step_contraction(trace, r2);
  EXPECT_EQ(ok.size(), 6u * 3u);
  for (const auto& c : ok) EXPECT_TRUE(c.ok) << c.k << " " << to_string(c.measure);
  for (const auto& c : per_step_contraction(trace, 0.99 * r2)) EXPECT_FALSE(c.ok);
}

TEST(PerStep, SkipsMissingInitialResidual) {
  const auto trace = lasso_run(3, 0.25, 4, false);
  const auto checks = per_step_contraction(trace, rho(trace.problem.params(), 0.25).rho_squared);
  EXPECT_EQ(checks.size(), 4u * 3u - 1u);
  for (const auto& c : checks) EXPECT_TRUE(c.ok);
}
