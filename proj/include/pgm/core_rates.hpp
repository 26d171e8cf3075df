#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pgm {

/// Constants of the class F_{mu,L}: L-smooth, mu-strongly convex.
/// mu = 0 is admitted only as the smooth-convex limit regime.
struct ClassParams {
  double mu = 0.0;
  double L = 1.0;

  ClassParams() = default;
  ClassParams(double mu_, double L_) : mu(mu_), L(L_) {
    if (!(mu >= 0.0) || !(L > 0.0) || !(mu <= L) || !std::isfinite(L)) {
      throw std::invalid_argument("ClassParams requires 0 <= mu <= L < inf, L > 0");
    }
  }

  bool strongly_convex() const { return mu > 0.0; }
  double condition_number() const { return L / mu; }
  double optimal_step() const { return 2.0 / (L + mu); }
};

struct Rate {
  double rho = 1.0;
  double rho_squared = 1.0;

  static Rate from_rho(double r) { return Rate{r, r * r}; }
};

/// max{|1 - L*gamma|, |1 - mu*gamma|}
inline Rate rho(const ClassParams& p, double gamma) {
  return Rate::from_rho(std::max(std::abs(1.0 - p.L * gamma), std::abs(1.0 - p.mu * gamma)));
}

struct OptimalStep {
  double gamma;
  Rate rate;
};

inline OptimalStep optimal_step(const ClassParams& p) {
  return {2.0 / (p.L + p.mu), Rate::from_rho((p.L - p.mu) / (p.L + p.mu))};
}

/// Which branch of rho(gamma) is active; both agree at 2/(L+mu).
enum class RateBranch { Mu, L };

inline RateBranch rate_branch(const ClassParams& p, double gamma) {
  return gamma <= p.optimal_step() ? RateBranch::Mu : RateBranch::L;
}

enum class Measure { DistanceSq, FuncGap, ResidualGradSq };

inline constexpr Measure kAllMeasures[] = {Measure::DistanceSq, Measure::FuncGap,
                                           Measure::ResidualGradSq};

inline std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::DistanceSq: return "dist_sq";
    case Measure::FuncGap: return "func_gap";
    case Measure::ResidualGradSq: return "residual_grad_sq";
  }
  return "?";
}

inline Measure measure_from_string(std::string_view s) {
  if (s == "dist_sq" || s == "dist" || s == "distance") return Measure::DistanceSq;
  if (s == "func_gap" || s == "gap" || s == "funcgap") return Measure::FuncGap;
  if (s == "residual_grad_sq" || s == "residual" || s == "res") return Measure::ResidualGradSq;
  throw std::invalid_argument("unknown measure: " + std::string(s));
}

enum class Provenance {
  ProvenTight,                  // diagonal cells
  ProvenUpperTightForSmallStep, // off-diagonal, tight for gamma <= 2/(L+mu)
  ConjecturedTight,             // gamma = 1/L lower bounds and their mu -> 0 limits
  ClassicalNotTight,            // (L/mu)-constant bounds obtained from distance
};

inline std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::ProvenTight: return "proven_tight";
    case Provenance::ProvenUpperTightForSmallStep: return "proven_upper_tight_for_small_step";
    case Provenance::ConjecturedTight: return "conjectured_tight";
    case Provenance::ClassicalNotTight: return "classical_not_tight";
  }
  return "?";
}

/// Factor multiplying the initial measure, or Unbounded.
struct BoundValue {
  bool unbounded = false;
  double value = 0.0;
  Provenance provenance = Provenance::ProvenTight;

  static BoundValue finite(double v, Provenance p) { return {false, v, p}; }
  static BoundValue infinite(Provenance p) { return {true, 0.0, p}; }
  bool is_finite() const { return !unbounded; }
};

/// Thrown when a requested (init, final) cell has no known guarantee.
class NoKnownBound : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline bool is_short_step(const ClassParams& p, double gamma) {
  return std::abs(gamma * p.L - 1.0) <= 1e-12;
}

namespace detail {

inline BoundValue limit_table(Measure init, Measure final_measure, double L, int k) {
  const auto conj = Provenance::ConjecturedTight;
  const double kk = static_cast<double>(k);
  if (init == final_measure) return BoundValue::finite(1.0, Provenance::ProvenTight);
  switch (final_measure) {
    case Measure::DistanceSq:
      return BoundValue::infinite(conj);
    case Measure::FuncGap:
      if (init == Measure::DistanceSq) return BoundValue::finite(L / (4.0 * kk), conj);
      return BoundValue::infinite(conj);
    case Measure::ResidualGradSq:
      if (init == Measure::DistanceSq) return BoundValue::finite(L * L / (kk * kk), conj);
      return BoundValue::finite(L / kk, conj);
  }
  throw std::logic_error("unreachable");
}

}  // namespace detail

/// Worst-case factor c such that final_k <= c * init_0.
///
/// Diagonal cells are rho^{2k}. The three cells bounded through strong convexity
/// (FuncGap->Distance, Residual->Distance, Residual->FuncGap) use rho^{2k} times
/// 2/mu, 1/mu^2 and 1/(2mu). The remaining cells only have the gamma = 1/L
/// lower-bound expressions, returned when `conjectured` is set. mu = 0 returns
/// the smooth-convex limits and requires gamma = 1/L.
inline BoundValue bound_lookup(Measure init, Measure final_measure, const ClassParams& p,
                               double gamma, int k, bool conjectured = false) {
  if (k < 1) throw std::invalid_argument("bound_lookup: k must be >= 1");
  if (!p.strongly_convex()) {
    if (!is_short_step(p, gamma)) {
      throw NoKnownBound("bound_lookup: mu = 0 is only tabulated for gamma = 1/L");
    }
    return detail::limit_table(init, final_measure, p.L, k);
  }

  const double r2k = std::pow(rho(p, gamma).rho_squared, k);
  const double mu = p.mu;
  if (init == final_measure) return BoundValue::finite(r2k, Provenance::ProvenTight);

  const auto upper = Provenance::ProvenUpperTightForSmallStep;
  if (init == Measure::FuncGap && final_measure == Measure::DistanceSq)
    return BoundValue::finite(2.0 / mu * r2k, upper);
  if (init == Measure::ResidualGradSq && final_measure == Measure::DistanceSq)
    return BoundValue::finite(r2k / (mu * mu), upper);
  if (init == Measure::ResidualGradSq && final_measure == Measure::FuncGap)
    return BoundValue::finite(r2k / (2.0 * mu), upper);

  if (!conjectured || !is_short_step(p, gamma)) {
    throw NoKnownBound("bound_lookup: no analytical guarantee for " +
                       std::string(to_string(init)) + " -> " +
                       std::string(to_string(final_measure)) +
                       " (conjectured values exist only for gamma = 1/L)");
  }
  // gamma = 1/L, so rho = 1 - mu/L; rho^{-j} - 1 via expm1 keeps mu -> 0 accurate.
  const double log_rho = std::log1p(-mu / p.L);
  const double inv2k = std::expm1(-2.0 * k * log_rho);
  const double invk = std::expm1(-static_cast<double>(k) * log_rho);
  const auto conj = Provenance::ConjecturedTight;
  if (init == Measure::DistanceSq && final_measure == Measure::FuncGap)
    return BoundValue::finite(0.5 * mu / inv2k, conj);
  if (init == Measure::DistanceSq && final_measure == Measure::ResidualGradSq)
    return BoundValue::finite(mu * mu / (invk * invk), conj);
  // FuncGap -> Residual
  return BoundValue::finite(2.0 * mu / inv2k, conj);
}

/// The (L/mu)-constant bounds obtained by converting distance rates. The
/// residual variant is for the unsquared gradient norm.
inline BoundValue classical_nontight_bound(const ClassParams& p, double gamma, int k,
                                           Measure m) {
  if (!p.strongly_convex()) throw std::domain_error("classical bound requires mu > 0");
  if (k < 0) throw std::invalid_argument("classical bound: k must be >= 0");
  const double r = rho(p, gamma).rho;
  switch (m) {
    case Measure::FuncGap:
      return BoundValue::finite(p.condition_number() * std::pow(r, 2.0 * k),
                                Provenance::ClassicalNotTight);
    case Measure::ResidualGradSq:
      return BoundValue::finite(p.condition_number() * std::pow(r, static_cast<double>(k)),
                                Provenance::ClassicalNotTight);
    case Measure::DistanceSq:
      break;
  }
  throw std::invalid_argument("classical bound is defined for func_gap and residual only");
}

}  // namespace pgm
