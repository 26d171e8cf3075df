#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgm/core_rates.hpp"
#include "pgm/pgm_engine.hpp"

namespace pgm {

/// The three measures at one iterate.
struct MeasureTriple {
  double dist_sq = 0.0;
  double func_gap = 0.0;
  double residual_grad_sq = 0.0;

  static MeasureTriple from_record(const IterateRecord& r) {
    if (!r.dist_sq || !r.func_gap || !r.residual_grad_sq)
      throw std::invalid_argument("MeasureTriple: record lacks one of the three measures");
    return {*r.dist_sq, *r.func_gap, *r.residual_grad_sq};
  }
};

/// rhs - lhs of one inequality; `scale` makes the slack dimensionless.
struct InequalitySlack {
  std::string id;
  double lhs;
  double rhs;
  double slack;
  double scale;

  double normalized() const { return slack / scale; }
};

namespace detail {
inline InequalitySlack make_slack(std::string id, double lhs, double rhs, double floor) {
  const double scale = std::max({std::abs(lhs), std::abs(rhs), floor, 1e-300});
  return {std::move(id), lhs, rhs, rhs - lhs, scale};
}
}  // namespace detail

/// (i) dist <= res/mu^2, (ii) gap <= res/(2mu), (iii) dist <= 2 gap/mu.
/// `noise_floor` bounds the scale from below, for measures computed at the
/// level of floating-point roundoff.
inline std::vector<InequalitySlack> check_proposition(const MeasureTriple& t, const ClassParams& p,
                                                      double noise_floor = 0.0) {
  if (!p.strongly_convex())
    throw std::domain_error("check_proposition: the inequalities need mu > 0");
  const double mu = p.mu;
  return {
      detail::make_slack("i", t.dist_sq, t.residual_grad_sq / (mu * mu), noise_floor),
      detail::make_slack("ii", t.func_gap, t.residual_grad_sq / (2.0 * mu), noise_floor),
      detail::make_slack("iii", t.dist_sq, 2.0 * t.func_gap / mu, noise_floor),
  };
}

struct MixedBoundSlack {
  Measure init;
  Measure final_measure;
  int k;
  BoundValue bound;
  double initial;
  double final_value;
  double slack;  // bound * initial - final; +inf for unbounded cells
  double scale;

  double normalized() const { return std::isinf(slack) ? slack : slack / scale; }
};

/// Compares measure `final_measure` at iterate k with the tabulated factor
/// times measure `init` at iterate 0.
inline MixedBoundSlack check_mixed_bound(const IterateTrace& trace, Measure init,
                                         Measure final_measure, int k, bool conjectured = false,
                                         double noise_floor = 0.0) {
  if (k < 1 || static_cast<std::size_t>(k) >= trace.records.size())
    throw std::invalid_argument("check_mixed_bound: k out of range of the trace");
  const auto gamma = trace.constant_step();
  if (!gamma) throw std::invalid_argument("check_mixed_bound: trace must use a constant step");
  const ClassParams& p = trace.problem.params();
  if (*gamma > 2.0 / p.L)
    throw std::domain_error("check_mixed_bound: gamma > 2/L has no guarantee");
  const auto initial = trace.records.front().measure(init);
  if (!initial) {
    if (init == Measure::ResidualGradSq)
      throw std::invalid_argument(
          "check_mixed_bound: residual-initial bounds need a subgradient s0 of h at x0");
    throw std::invalid_argument("check_mixed_bound: initial measure unavailable (unknown optimum)");
  }
  const auto fin = trace.records[static_cast<std::size_t>(k)].measure(final_measure);
  if (!fin) throw std::invalid_argument("check_mixed_bound: final measure unavailable");

  const BoundValue b = bound_lookup(init, final_measure, p, *gamma, k, conjectured);
  MixedBoundSlack s{init, final_measure, k, b, *initial, *fin, 0.0, 0.0};
  if (b.unbounded) {
    s.slack = kInf;
    s.scale = 1.0;
    return s;
  }
  const double allowed = b.value * *initial;
  s.slack = allowed - *fin;
  s.scale = std::max({std::abs(allowed), std::abs(*fin), noise_floor, 1e-300});
  return s;
}

/// Magnitude of the rounding error in one stored measure. Func gaps are
/// differences of two objective values and residuals cancel g against s, so
/// their error tracks the raw magnitudes rather than the measure itself.
inline double roundoff_scale(const IterateTrace& trace, std::size_t k, Measure m) {
  const IterateRecord& r = trace.records[k];
  const auto& opt = trace.problem.optimum;
  switch (m) {
    case Measure::DistanceSq:
      return r.x.squaredNorm() + (opt ? opt->x.squaredNorm() : 0.0);
    case Measure::FuncGap:
      return std::abs(r.F) + (opt ? std::abs(opt->F) : 0.0);
    case Measure::ResidualGradSq: {
      double s = r.grad_f.squaredNorm() + (r.s ? r.s->squaredNorm() : 0.0);
      if (k > 0) {
        const double g = trace.gamma_used[k - 1];
        s += (trace.records[k - 1].x.squaredNorm() + r.x.squaredNorm()) / (g * g);
      }
      return s;
    }
  }
  return 0.0;
}

struct StepCheck {
  std::size_t k;  // compares iterate k+1 with iterate k
  Measure measure;
  double previous;
  double next;
  double allowed;  // rate_sq * previous * (1 + rel_tol) + floor
  bool ok;
};

/// next <= rate_sq * previous * (1 + rel_tol) + floor_rel * roundoff_scale for
/// every consecutive pair and every measure present in the trace.
inline std::vector<StepCheck> per_step_contraction(const IterateTrace& trace, double rate_sq,
                                                   double rel_tol = 1e-8,
                                                   double floor_rel = 1e-12) {
  std::vector<StepCheck> out;
  for (std::size_t k = 0; k + 1 < trace.records.size(); ++k)
    for (Measure m : kAllMeasures) {
      const auto prev = trace.records[k].measure(m);
      const auto next = trace.records[k + 1].measure(m);
      if (!prev || !next) continue;
      const double floor = floor_rel * std::max(roundoff_scale(trace, k, m),
                                                roundoff_scale(trace, k + 1, m));
      const double allowed = rate_sq * *prev * (1.0 + rel_tol) + floor;
      out.push_back({k, m, *prev, *next, allowed, *next <= allowed});
    }
  return out;
}

}  // namespace pgm
