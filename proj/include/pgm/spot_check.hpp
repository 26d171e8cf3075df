#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "pgm/pgm_engine.hpp"
#include "pgm/smooth_catalog.hpp"
#include "pgm/symbolic.hpp"

namespace pgm {

/// Values of every symbol taken from one PGM step on a random 3-D catalog
/// instance (diagonal quadratic plus a weighted l1 term), with x_* the exact
/// optimum. All interpolation inequalities hold at this assignment.
inline Assignment catalog_assignment(double mu, double L, double gamma, std::uint64_t seed) {
  const ClassParams p(mu, L);
  constexpr Eigen::Index dim = 3;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CompositeProblem problem(random_instance(p, dim, rng()), ProxFunction::l1(0.5, dim));
  const Optimum& opt = problem.ensure_optimum();

  Vector xk(dim);
  for (Eigen::Index i = 0; i < dim; ++i) xk[i] = 3.0 * normal(rng);
  const Vector gk = eval_grad(problem.f, xk).grad;
  const Vector sk = closest_subgradient(problem.h, xk, -gk);
  const auto [xk1, sk1] = pgm_step(problem, gamma, xk, gk);
  const Vector gk1 = eval_grad(problem.f, xk1).grad;
  const Vector gs = eval_grad(problem.f, opt.x).grad;

  Assignment a;
  auto set = [&](VectorSymbol s, Vector v) { a.vectors[static_cast<int>(s)] = std::move(v); };
  set(VectorSymbol::X, xk - opt.x);
  set(VectorSymbol::Gk, gk);
  set(VectorSymbol::Gk1, gk1);
  set(VectorSymbol::Gs, gs);
  set(VectorSymbol::Sk, sk);
  set(VectorSymbol::Sk1, sk1);
  set(VectorSymbol::Xk1, xk1 - opt.x);
  set(VectorSymbol::Ss, -gs);
  auto put = [&](ScalarSymbol s, double v) { a.scalars[static_cast<int>(s)] = v; };
  put(ScalarSymbol::One, 1.0);
  put(ScalarSymbol::Fk, eval_grad(problem.f, xk).value);
  put(ScalarSymbol::Fk1, eval_grad(problem.f, xk1).value);
  put(ScalarSymbol::Fs, eval_grad(problem.f, opt.x).value);
  put(ScalarSymbol::Hk, value(problem.h, xk));
  put(ScalarSymbol::Hk1, value(problem.h, xk1));
  put(ScalarSymbol::Hs, value(problem.h, opt.x));
  return a;
}

/// Largest |expr| over `trials` catalog assignments; a zero expression gives 0.
inline double numeric_spot_check(const SymbolicExpr<Rational>& expr, double mu, double L,
                                 double gamma, int trials, std::uint64_t seed) {
  if (expr.is_zero()) return 0.0;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t)
    worst = std::max(worst, std::abs(evaluate(expr, catalog_assignment(mu, L, gamma, rng()))));
  return worst;
}

/// Smallest value of expr over `trials` catalog assignments.
inline double numeric_min_value(const SymbolicExpr<Rational>& expr, double mu, double L,
                                double gamma, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double lowest = kInf;
  for (int t = 0; t < trials; ++t)
    lowest = std::min(lowest, evaluate(expr, catalog_assignment(mu, L, gamma, rng())));
  return lowest;
}

}  // namespace pgm
