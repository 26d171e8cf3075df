#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pgm/core_rates.hpp"
#include "pgm/prox_catalog.hpp"
#include "pgm/smooth_catalog.hpp"
#include "pgm/types.hpp"

namespace pgm {

enum class PredictionKind {
  RatioOverHorizon,  // final_N / init_0
  PerStepRatio,      // final_{k+1} / final_k for every k
  FinalValue,        // absolute value of the final measure at N
};

struct Prediction {
  double value;
  PredictionKind kind;
  std::string formula;
};

using Cell = std::pair<Measure, Measure>;  // (init, final)

/// A problem instance together with the value it is predicted to attain.
struct WorstCaseSpec {
  std::string name;
  CompositeProblem problem;
  Vector x0;
  Vector s0;
  int N = 0;
  /// Fixed step; empty for exact-line-search instances.
  std::optional<double> gamma;
  std::map<Cell, Prediction> predicted;
  /// x_0..x_N from the closed-form recurrence, when available.
  std::optional<std::vector<Vector>> closed_form_iterates;
  /// Linear coefficient of the one-dimensional constructions.
  std::optional<double> c;
};

/// f_mu = (mu/2)|x|^2 if gamma <= 2/(L+mu) else f_L = (L/2)|x|^2, whichever
/// attains rho(gamma); both lie in F_{mu,L}.
inline WorstCaseSpec quadratic_lower_bound(const ClassParams& p, double gamma, Eigen::Index dim,
                                           int N = 1) {
  if (!p.strongly_convex()) throw std::invalid_argument("quadratic_lower_bound requires mu > 0");
  if (!(gamma >= 0.0) || gamma > 2.0 / p.L)
    throw std::domain_error("quadratic_lower_bound: gamma outside [0, 2/L] has no attaining instance");
  if (N < 0) throw std::invalid_argument("quadratic_lower_bound: N must be nonnegative");
  const bool mu_branch = rate_branch(p, gamma) == RateBranch::Mu;
  const double a = mu_branch ? p.mu : p.L;
  WorstCaseSpec spec{mu_branch ? "qlb_f_mu" : "qlb_f_L",
                     CompositeProblem(SmoothFunction::scaled_sq_norm(a, dim, p),
                                      ProxFunction::zero(dim), Optimum{Vector::Zero(dim), 0.0}),
                     Vector::Ones(dim),
                     Vector::Zero(dim),
                     N,
                     gamma,
                     {},
                     std::nullopt,
                     std::nullopt};
  const double factor = 1.0 - gamma * a;
  const double ratio = std::pow(factor * factor, N);
  for (Measure m : kAllMeasures)
    spec.predicted[{m, m}] = {ratio, PredictionKind::RatioOverHorizon, "rho^(2N)"};
  std::vector<Vector> iterates;
  for (int k = 0; k <= N; ++k) iterates.push_back(std::pow(factor, k) * spec.x0);
  spec.closed_form_iterates = std::move(iterates);
  return spec;
}

enum class ShiftedQuadraticTarget { DistToFuncGap, DistToResidual, FuncGapToResidual };

inline std::string_view to_string(ShiftedQuadraticTarget t) {
  switch (t) {
    case ShiftedQuadraticTarget::DistToFuncGap: return "dist_to_func_gap";
    case ShiftedQuadraticTarget::DistToResidual: return "dist_to_residual";
    case ShiftedQuadraticTarget::FuncGapToResidual: return "func_gap_to_residual";
  }
  return "?";
}

inline Cell cell_of(ShiftedQuadraticTarget t) {
  switch (t) {
    case ShiftedQuadraticTarget::DistToFuncGap: return {Measure::DistanceSq, Measure::FuncGap};
    case ShiftedQuadraticTarget::DistToResidual: return {Measure::DistanceSq, Measure::ResidualGradSq};
    case ShiftedQuadraticTarget::FuncGapToResidual: return {Measure::FuncGap, Measure::ResidualGradSq};
  }
  throw std::logic_error("unreachable");
}

/// x_k of PGM at gamma = 1/L on min_{x>=0} (mu/2)x^2 + cx, kappa = mu/L, while
/// the iterates stay nonnegative.
inline double appendix_b_iterate(double mu, double L, double c, double x0, int k) {
  const double kappa = mu / L;
  const double q = std::pow(1.0 - kappa, k);
  return (c * q - c + kappa * L * q * x0) / (kappa * L);
}

/// One-dimensional composite quadratic attaining the gamma = 1/L mixed-measure
/// lower bounds. c is chosen per target so that F(x_N) - F* is maximal
/// (DistToFuncGap) or x_N = 0 exactly (residual targets).
inline WorstCaseSpec appendix_b_instance(const ClassParams& p, int N, double x0,
                                         ShiftedQuadraticTarget target) {
  if (!p.strongly_convex() || !(p.mu < p.L))
    throw std::invalid_argument("appendix_b_instance requires 0 < mu < L");
  if (N < 1) throw std::invalid_argument("appendix_b_instance: N must be >= 1");
  if (!(x0 > 0.0)) throw std::invalid_argument("appendix_b_instance: x0 must be positive");
  const double mu = p.mu, L = p.L, kappa = mu / L;
  const double log_q = std::log1p(-kappa);
  const double inv2N = std::expm1(-2.0 * N * log_q);  // (1-kappa)^{-2N} - 1
  const double invN = std::expm1(-static_cast<double>(N) * log_q);
  const double c = target == ShiftedQuadraticTarget::DistToFuncGap ? mu * x0 / inv2N : mu * x0 / invN;

  const double F0 = 0.5 * mu * x0 * x0 + c * x0;
  if (target == ShiftedQuadraticTarget::FuncGapToResidual) {
    const double c_alt = std::sqrt(2.0 * mu * F0) / std::sqrt(inv2N);
    if (std::abs(c_alt - c) > 1e-12 * c)
      throw std::logic_error("appendix_b_instance: the two expressions for c disagree");
  }

  std::vector<Vector> iterates;
  for (int k = 0; k <= N; ++k) {
    const double xk = appendix_b_iterate(mu, L, c, x0, k);
    if (xk < -1e-12 * x0)
      throw std::domain_error("appendix_b_instance: c too large, iterate leaves x >= 0");
    iterates.push_back(Vector::Constant(1, std::max(xk, 0.0)));
  }

  Vector d = Vector::Constant(1, mu), b = Vector::Constant(1, c);
  WorstCaseSpec spec{"appendix_b_" + std::string(to_string(target)),
                     CompositeProblem(SmoothFunction::diagonal(d, b, p), ProxFunction::nonneg(1),
                                      Optimum{Vector::Zero(1), 0.0}),
                     Vector::Constant(1, x0),
                     Vector::Zero(1),
                     N,
                     1.0 / L,
                     {},
                     std::move(iterates),
                     c};
  switch (target) {
    case ShiftedQuadraticTarget::DistToFuncGap:
      spec.predicted[cell_of(target)] = {0.5 * mu * x0 * x0 / inv2N, PredictionKind::FinalValue,
                                         "(mu/2) |x0-x*|^2 / (rho^(-2N) - 1)"};
      break;
    case ShiftedQuadraticTarget::DistToResidual:
      spec.predicted[cell_of(target)] = {mu * mu * x0 * x0 / (invN * invN),
                                         PredictionKind::FinalValue,
                                         "mu^2 |x0-x*|^2 / (rho^(-N) - 1)^2"};
      break;
    case ShiftedQuadraticTarget::FuncGapToResidual:
      spec.predicted[cell_of(target)] = {2.0 * mu * F0 / inv2N, PredictionKind::FinalValue,
                                         "2 mu (F(x0)-F*) / (rho^(-2N) - 1)"};
      break;
  }
  return spec;
}

/// min_{x>=0} cx at gamma = 1/L: the mu = 0 family whose FuncGap->Distance,
/// Residual->Distance and Residual->FuncGap ratios blow up as c -> 0.
/// The iterates are x_k = max(x0 - kc/L, 0) and the predictions are the
/// ratios at N as functions of c (undefined, hence absent, when x0 = 0).
inline WorstCaseSpec unbounded_family(double c, double x0 = 1.0, int N = 5, double L = 1.0) {
  if (!(c > 0.0)) throw std::invalid_argument("unbounded_family: c must be positive");
  if (!(x0 >= 0.0)) throw std::invalid_argument("unbounded_family: x0 must be nonnegative");
  if (N < 0) throw std::invalid_argument("unbounded_family: N must be nonnegative");
  const ClassParams p(0.0, L);
  std::vector<Vector> iterates;
  for (int k = 0; k <= N; ++k) iterates.push_back(Vector::Constant(1, std::max(x0 - k * c / L, 0.0)));
  const double xN = iterates.back()[0];
  WorstCaseSpec spec{"unbounded_family",
                     CompositeProblem(SmoothFunction::diagonal(Vector::Zero(1), Vector::Constant(1, c), p),
                                      ProxFunction::nonneg(1), Optimum{Vector::Zero(1), 0.0}),
                     Vector::Constant(1, x0),
                     Vector::Zero(1),
                     N,
                     1.0 / L,
                     {},
                     std::move(iterates),
                     c};
  if (x0 > 0.0) {
    // F0 - F* = c x0, residual_0 = c^2, dist_N = xN^2, gap_N = c xN.
    spec.predicted[{Measure::FuncGap, Measure::DistanceSq}] = {
        xN * xN / (c * x0), PredictionKind::RatioOverHorizon, "x_N^2 / (c x0)"};
    spec.predicted[{Measure::ResidualGradSq, Measure::DistanceSq}] = {
        xN * xN / (c * c), PredictionKind::RatioOverHorizon, "x_N^2 / c^2"};
    spec.predicted[{Measure::ResidualGradSq, Measure::FuncGap}] = {
        xN / c, PredictionKind::RatioOverHorizon, "x_N / c"};
  }
  return spec;
}

/// f = (mu x1^2 + L x2^2)/2 from (1/mu, 1/L): exact line search zigzags with
/// per-step func-gap ratio ((L-mu)/(L+mu))^2.
inline WorstCaseSpec els_worst_quadratic(const ClassParams& p, int N = 1) {
  if (!p.strongly_convex()) throw std::invalid_argument("els_worst_quadratic requires mu > 0");
  if (!(p.mu < p.L))
    throw std::domain_error("els_worst_quadratic: mu = L gives a degenerate instance (ratio 0)");
  if (N < 0) throw std::invalid_argument("els_worst_quadratic: N must be nonnegative");
  Vector d(2);
  d << p.mu, p.L;
  Vector x0(2);
  x0 << 1.0 / p.mu, 1.0 / p.L;
  const double r = (p.L - p.mu) / (p.L + p.mu);
  std::vector<Vector> iterates;
  for (int k = 0; k <= N; ++k) {
    Vector xk(2);
    xk << 1.0 / p.mu, (k % 2 == 0 ? 1.0 : -1.0) / p.L;
    iterates.push_back(std::pow(r, k) * xk);
  }
  WorstCaseSpec spec{"els_worst_quadratic",
                     CompositeProblem(SmoothFunction::diagonal(d, Vector::Zero(2), p),
                                      ProxFunction::zero(2), Optimum{Vector::Zero(2), 0.0}),
                     x0,
                     Vector::Zero(2),
                     N,
                     std::nullopt,
                     {},
                     std::move(iterates),
                     std::nullopt};
  spec.predicted[{Measure::FuncGap, Measure::FuncGap}] = {r * r, PredictionKind::PerStepRatio,
                                                          "((L-mu)/(L+mu))^2"};
  return spec;
}

}  // namespace pgm
