// One PASS/FAIL line per acceptance criterion; exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pgm/certificates.hpp"
#include "pgm/core_rates.hpp"
#include "pgm/mixed_measures.hpp"
#include "pgm/pgm_engine.hpp"
#include "pgm/worstcase_gen.hpp"

using namespace pgm;

namespace {

// Pinned tolerances.
constexpr double kDiagonalRelTol = 1e-10;        // 1
constexpr double kEnvelopeRelTol = 1e-8;         // 2
constexpr double kCertificateSeconds = 10.0;     // 3
constexpr double kIterateAbsTol = 1e-12;         // 4
constexpr double kTable2RelTol = 1e-10;          // 4
constexpr double kLimitValue = 0.05;             // 5: L/(4N) at L = 1, N = 5
constexpr double kWitnessGrowth = 10.0;          // 5
constexpr double kElsRelTol = 1e-8;              // 6
constexpr double kSlackTol = 1e-9;               // 7
constexpr double kZeroSlackTol = 1e-10;          // 7
constexpr double kPropertyTol = 1e-12;           // 8
// Roundoff allowance: absolute slack of 1e-12 times the raw magnitudes that
// enter a stored measure (see roundoff_scale).
constexpr double kFloorRel = 1e-12;

struct Outcome {
  bool pass;
  std::string detail;
};

// Traces collected by criteria 1-6 for criterion 7; `exact_fmu` marks the
// f_mu traces with gamma <= 2/(L+mu).
struct CollectedTrace {
  IterateTrace trace;
  bool exact_fmu;
};
std::vector<CollectedTrace> g_traces;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double rho_oracle(double mu, double L, double gamma) {
  return std::max(std::abs(1.0 - L * gamma), std::abs(1.0 - mu * gamma));
}

double rel_err(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

struct Pair {
  double mu, L;
};

const std::vector<Pair> kStronglyConvexGrid{{0.1, 1.0}, {0.1, 10.0}, {1.0, 10.0}};

std::vector<double> gamma_grid(const Pair& p) {
  return {0.3 / p.L, 1.0 / p.L, 2.0 / (p.L + p.mu), 1.5 / p.L, 1.9 / p.L};
}

Vector random_point(std::mt19937_64& rng, Eigen::Index dim, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector x(dim);
  for (auto& v : x) v = scale * normal(rng);
  return x;
}

ProxFunction cycle_h(int i, Eigen::Index dim) {
  switch (i % 3) {
    case 0: return ProxFunction::zero(dim);
    case 1: return ProxFunction::nonneg(dim);
    default: return ProxFunction::l1(0.5, dim);
  }
}

Vector feasible_start(const ProxFunction& h, Vector x) {
  if (std::holds_alternative<prox_kind::IndicatorNonneg>(h.kind())) return x.cwiseAbs();
  return x;
}

// ------------------------------------------------------------------ 1

Outcome criterion1() {
  constexpr int N = 10;
  double worst = 0.0;
  int runs = 0;
  for (const Pair& pr : kStronglyConvexGrid)
    for (double gamma : gamma_grid(pr)) {
      const ClassParams p(pr.mu, pr.L);
      const auto spec = quadratic_lower_bound(p, gamma, 3, N);
      auto trace = run(spec.problem, gamma, spec.x0, N, RunOptions{spec.s0});
      const double predicted = std::pow(rho_oracle(pr.mu, pr.L, gamma), 2 * N);
      for (Measure m : kAllMeasures) {
        const double ratio = *trace.records.back().measure(m) / *trace.records.front().measure(m);
        worst = std::max(worst, rel_err(ratio, predicted));
      }
      ++runs;
      g_traces.push_back({std::move(trace), gamma <= 2.0 / (pr.L + pr.mu)});
    }
  return {worst <= kDiagonalRelTol,
          std::to_string(runs) + " runs, max rel err " + fmt(worst)};
}

// ------------------------------------------------------------------ 2

Outcome criterion2() {
  constexpr int instances = 50, N = 20;
  int violations = 0, checks = 0;
  double worst_ratio = 0.0;  // next / (rho^2 prev) over non-negligible steps
  for (int i = 0; i < instances; ++i) {
    const Pair& pr = kStronglyConvexGrid[i % kStronglyConvexGrid.size()];
    const ClassParams p(pr.mu, pr.L);
    const Eigen::Index dim = 1 + i % 20;
    std::mt19937_64 rng(1000 + i);
    CompositeProblem problem(random_instance(p, dim, rng()), cycle_h(i, dim));
    problem.ensure_optimum();
    const Vector x0 = feasible_start(problem.h, random_point(rng, dim, 3.0));
    const Vector s0 = closest_subgradient(problem.h, x0, -eval_grad(problem.f, x0).grad);
    for (double gamma : gamma_grid(pr)) {
      auto trace = run(problem, gamma, x0, N, RunOptions{s0});
      const double r2 = std::pow(rho_oracle(pr.mu, pr.L, gamma), 2);
      for (const auto& c : per_step_contraction(trace, r2, kEnvelopeRelTol, kFloorRel)) {
        ++checks;
        if (!c.ok) ++violations;
        if (c.previous > 1e-8 * roundoff_scale(trace, c.k, c.measure))
          worst_ratio = std::max(worst_ratio, c.next / (r2 * c.previous));
      }
      g_traces.push_back({std::move(trace), false});
    }
  }
  return {violations == 0, std::to_string(checks) + " step checks, " + std::to_string(violations) +
                               " violations, max ratio/rho^2 " + fmt(worst_ratio)};
}

// ------------------------------------------------------------------ 3

// Reference display of the distance identity at (mu, L, gamma) on the gauge x_* = 0; the x_k, x_*
// pairs collapse onto X = x_k - x_*.
SymbolicExpr<Rational> reference_display(const Rational& m, const Rational& l, const Rational& g) {
  using VS = VectorSymbol;
  SymbolicExpr<Rational> d;
  d.at(VS::Gk, VS::Gk) = g - g * g * m;
  d.at(VS::Gk, VS::Gs) = g * g * m + g * g * l - 2 * g;
  d.at(VS::Gk, VS::Sk1) = g * g * l - g * g * m;
  d.at(VS::Gk, VS::X) = g * g * m * m + g * g * m * l - g * l - g * m;
  d.at(VS::Gs, VS::Gs) = g - g * g * m;
  d.at(VS::Gs, VS::Sk1) = g * g * l - g * g * m;
  d.at(VS::Gs, VS::X) = 2 * g * m - g * g * m * m - g * g * m * l;
  d.at(VS::Sk1, VS::Sk1) = g * g * l - g * g * m;
  d.at(VS::Sk1, VS::X) = g * m - g * l;
  d.at(VS::X, VS::X) = g * m * l - g * g * m * m * l;
  return d;
}

Outcome criterion3() {
  const auto start = std::chrono::steady_clock::now();
  const auto grid = default_certificate_grid();
  std::set<std::tuple<Rational, Rational, Rational>> points;
  int boundary_small = 0, boundary_large = 0;
  for (const auto& gp : grid) {
    points.insert({gp.mu, gp.L, gp.gamma});
    if (gp.gamma == 2 / (gp.L + gp.mu)) (gp.regime == Regime::SmallStep ? boundary_small : boundary_large)++;
  }
  const std::vector<Theorem> theorems{Theorem::Distance, Theorem::Residual, Theorem::FuncValue};
  int unverified = 0;
  for (const auto& rep : verify_grid(theorems, grid))
    if (!rep.verified) ++unverified;

  const Rational mu(1), L(2), gamma(1, 2);
  const auto cert = distance_certificate<Rational>(mu, L, gamma, Regime::SmallStep);
  const bool display_match = -cert.weighted_sum() == (Rational(2) / (L - mu)) * reference_display(mu, L, gamma);

  // Every multiplier and SOS coefficient, perturbed in both directions, on
  // the points gamma in {1/L, 2/(L+mu)} of the grid.
  int mutations = 0, survived = 0;
  for (Theorem t : theorems)
    for (const auto& gp : grid) {
      if (gp.gamma != 1 / gp.L && gp.gamma != 2 / (gp.L + gp.mu)) continue;
      const auto base = build_certificate(t, gp.mu, gp.L, gp.gamma, gp.regime);
      for (const Rational& delta : {Rational(1, 1000), Rational(-1, 1000)}) {
        for (std::size_t i = 0; i < base.inequalities.size(); ++i) {
          auto c = base;
          c.inequalities[i].multiplier += delta;
          ++mutations;
          if (check(c).verified) ++survived;
        }
        for (std::size_t i = 0; i < base.sos.size(); ++i) {
          auto c = base;
          c.sos[i].coefficient += delta;
          ++mutations;
          if (check(c).verified) ++survived;
        }
      }
    }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool pass = points.size() >= 100 && boundary_small > 0 && boundary_large > 0 &&
                    unverified == 0 && display_match && survived == 0 && seconds <= kCertificateSeconds;
  return {pass, std::to_string(points.size()) + " points, " + std::to_string(grid.size() * 3) +
                    " reports, " + std::to_string(unverified) + " unverified, reference display " +
                    (display_match ? "match" : "MISMATCH") + ", " + std::to_string(survived) + "/" +
                    std::to_string(mutations) + " mutations survived, " +
                    fmt(seconds) + " s"};
}

// ------------------------------------------------------------------ 4

Outcome criterion4() {
  double worst_iter = 0.0, worst_value = 0.0;
  double smoke = 0.0;
  for (const Pair pr : std::vector<Pair>{{1, 2}, {1, 10}, {0.5, 1}})
    for (int N : {1, 2, 5})
      for (auto target : {ShiftedQuadraticTarget::DistToFuncGap, ShiftedQuadraticTarget::DistToResidual,
                          ShiftedQuadraticTarget::FuncGapToResidual}) {
        const ClassParams p(pr.mu, pr.L);
        const double x0 = 1.0;
        const auto spec = appendix_b_instance(p, N, x0, target);
        auto trace = run(spec.problem, 1.0 / pr.L, spec.x0, N, RunOptions{spec.s0});
        const double c = *spec.c;
        // Independent recurrence: x+ = max(x - (mu x + c)/L, 0).
        double x = x0;
        for (int k = 0; k <= N; ++k) {
          worst_iter = std::max({worst_iter, std::abs(trace.records[k].x[0] - x),
                                 std::abs(trace.records[k].x[0] - (*spec.closed_form_iterates)[k][0])});
          x = std::max(x - (pr.mu * x + c) / pr.L, 0.0);
        }
        const double rho = 1.0 - pr.mu / pr.L;
        const double inv2N = std::pow(rho, -2.0 * N) - 1.0, invN = std::pow(rho, -1.0 * N) - 1.0;
        const auto [init, fin] = cell_of(target);
        double predicted = 0.0;
        switch (target) {
          case ShiftedQuadraticTarget::DistToFuncGap: predicted = 0.5 * pr.mu * x0 * x0 / inv2N; break;
          case ShiftedQuadraticTarget::DistToResidual: predicted = pr.mu * pr.mu * x0 * x0 / (invN * invN); break;
          case ShiftedQuadraticTarget::FuncGapToResidual:
            predicted = 2.0 * pr.mu * *trace.records.front().func_gap / inv2N;
            break;
        }
        const double attained = *trace.records.back().measure(fin);
        worst_value = std::max(worst_value, rel_err(attained, predicted));
        if (pr.mu == 1 && pr.L == 2 && N == 2 && target == ShiftedQuadraticTarget::DistToFuncGap)
          smoke = attained;
        (void)init;
        g_traces.push_back({std::move(trace), false});
      }
  const bool smoke_ok = rel_err(smoke, 1.0 / 30.0) <= kTable2RelTol;
  return {worst_iter <= kIterateAbsTol && worst_value <= kTable2RelTol && smoke_ok,
          "max iterate err " + fmt(worst_iter) + ", max value rel err " +
              fmt(worst_value) + ", value(1,2,N=2) " + fmt(smoke)};
}

// ------------------------------------------------------------------ 5

Outcome criterion5() {
  constexpr int N = 5;
  constexpr double L = 1.0, x0 = 1.0;
  std::vector<double> errors;
  std::string detail = "err";
  for (double mu : {1e-2, 1e-4, 1e-6}) {
    const ClassParams p(mu, L);
    const auto spec = appendix_b_instance(p, N, x0, ShiftedQuadraticTarget::DistToFuncGap);
    auto trace = run(spec.problem, 1.0 / L, spec.x0, N, RunOptions{spec.s0});
    const double predicted = spec.predicted.at({Measure::DistanceSq, Measure::FuncGap}).value;
    const double attained = *trace.records.back().func_gap;
    const double err = std::max(std::abs(predicted - kLimitValue), std::abs(attained - kLimitValue));
    errors.push_back(err);
    detail += " " + fmt(err);
    g_traces.push_back({std::move(trace), false});
  }
  // mu shrinks 100x per step, so should the error.
  bool proportional = true;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    const double ratio = errors[i] / errors[i + 1];
    proportional = proportional && ratio > 50.0 && ratio < 200.0;
  }

  double min_growth = kInf;
  for (double c : {1e-1, 1e-2, 1e-3}) {
    const auto big = unbounded_family(c, x0, N, L), small = unbounded_family(c / 10.0, x0, N, L);
    auto tb = run(big.problem, 1.0 / L, big.x0, N, RunOptions{big.s0});
    auto ts = run(small.problem, 1.0 / L, small.x0, N, RunOptions{small.s0});
    for (const auto& [cell, pred] : big.predicted) {
      auto ratio = [&](const IterateTrace& t) {
        return *t.records.back().measure(cell.second) / *t.records.front().measure(cell.first);
      };
      min_growth = std::min(min_growth, ratio(ts) / ratio(tb));
    }
    g_traces.push_back({std::move(tb), false});
    g_traces.push_back({std::move(ts), false});
  }
  detail += ", min witness growth " + fmt(min_growth);
  return {proportional && min_growth >= kWitnessGrowth, detail};
}

// ------------------------------------------------------------------ 6

Outcome criterion6() {
  double worst_tight = 0.0;
  for (const Pair pr : std::vector<Pair>{{1, 10}, {1, 100}}) {
    const ClassParams p(pr.mu, pr.L);
    const auto spec = els_worst_quadratic(p, 5);
    auto trace = run_exact_line_search(spec.problem, spec.x0, 5);
    const double r = (pr.L - pr.mu) / (pr.L + pr.mu);
    for (std::size_t k = 0; k + 1 < trace.records.size(); ++k)
      worst_tight = std::max(worst_tight, rel_err(*trace.records[k + 1].func_gap /
                                                      *trace.records[k].func_gap, r * r));
    g_traces.push_back({std::move(trace), false});
  }

  constexpr int instances = 20, N = 10;
  int els_violations = 0, rls_violations = 0, checks = 0;
  for (int i = 0; i < instances; ++i) {
    const Pair& pr = kStronglyConvexGrid[i % kStronglyConvexGrid.size()];
    const ClassParams p(pr.mu, pr.L);
    const double r2 = std::pow((pr.L - pr.mu) / (pr.L + pr.mu), 2);
    const Eigen::Index dim = 2 + i % 10;
    std::mt19937_64 rng(5000 + i);
    CompositeProblem problem(random_instance(p, dim, rng()), cycle_h(i, dim));
    problem.ensure_optimum();
    const Vector x0 = feasible_start(problem.h, random_point(rng, dim, 3.0));
    auto trace = run_exact_line_search(problem, x0, N);
    for (const auto& c : per_step_contraction(trace, r2, kElsRelTol, kFloorRel)) {
      if (c.measure != Measure::FuncGap) continue;
      ++checks;
      if (!c.ok) ++els_violations;
    }
    g_traces.push_back({std::move(trace), false});

    Vector x = x0;
    for (int k = 0; k < N; ++k) {
      const Vector g = eval_grad(problem.f, x).grad;
      const Vector next = residual_line_search_step(problem.f, x).x_next;
      const Vector gn = eval_grad(problem.f, next).grad;
      const double floor = kFloorRel * (g.squaredNorm() + gn.squaredNorm());
      ++checks;
      if (gn.squaredNorm() > r2 * g.squaredNorm() * (1.0 + kElsRelTol) + floor) ++rls_violations;
      x = next;
    }
  }
  return {worst_tight <= kElsRelTol && els_violations == 0 && rls_violations == 0,
          "worst-case rel err " + fmt(worst_tight) + ", " + std::to_string(checks) +
              " checks, " + std::to_string(els_violations) + " ELS and " +
              std::to_string(rls_violations) + " residual-search violations"};
}

// ------------------------------------------------------------------ 7

Outcome criterion7() {
  int slacks = 0, negative = 0, nonzero_exact = 0;
  double worst = kInf;
  for (const auto& [trace, exact_fmu] : g_traces) {
    const ClassParams& p = trace.problem.params();
    if (p.strongly_convex()) {
      for (std::size_t k = 0; k < trace.records.size(); ++k) {
        const double rd = roundoff_scale(trace, k, Measure::DistanceSq);
        const double rf = roundoff_scale(trace, k, Measure::FuncGap);
        const double rr = roundoff_scale(trace, k, Measure::ResidualGradSq);
        if (!trace.records[k].residual_grad_sq) continue;
        const double floor =
            (kFloorRel / kSlackTol) *
            std::max({rd + rr / (p.mu * p.mu), rf + rr / (2.0 * p.mu), rd + 2.0 * rf / p.mu});
        for (const auto& s : check_proposition(MeasureTriple::from_record(trace.records[k]), p, floor)) {
          ++slacks;
          worst = std::min(worst, s.normalized());
          if (s.normalized() < -kSlackTol) ++negative;
        }
      }
    }
    const auto gamma = trace.constant_step();
    if (!gamma || *gamma > 2.0 / p.L) continue;
    for (std::size_t k = 1; k < trace.records.size(); ++k)
      for (Measure init : kAllMeasures)
        for (Measure fin : kAllMeasures) {
          BoundValue b;
          try {
            b = bound_lookup(init, fin, p, *gamma, static_cast<int>(k));
          } catch (const NoKnownBound&) {
            continue;
          }
          if (b.unbounded || b.provenance == Provenance::ConjecturedTight) continue;
          if (!trace.records.front().measure(init)) continue;
          const double floor = (kFloorRel / kSlackTol) *
                               (b.value * roundoff_scale(trace, 0, init) + roundoff_scale(trace, k, fin));
          const auto s = check_mixed_bound(trace, init, fin, static_cast<int>(k), false, floor);
          ++slacks;
          worst = std::min(worst, s.normalized());
          if (s.normalized() < -kSlackTol) ++negative;
          if (exact_fmu) {
            const auto exact = check_mixed_bound(trace, init, fin, static_cast<int>(k));
            if (std::abs(exact.normalized()) > kZeroSlackTol) ++nonzero_exact;
          }
        }
  }
  return {negative == 0 && nonzero_exact == 0,
          std::to_string(g_traces.size()) + " traces, " + std::to_string(slacks) + " slacks, " +
              std::to_string(negative) + " negative, min normalized " + fmt(worst) +
              ", " + std::to_string(nonzero_exact) + " nonzero f_mu slacks"};
}

// ------------------------------------------------------------------ 8

Outcome criterion8() {
  constexpr int trials = 100;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_h = [&](int i, Eigen::Index dim) {
    switch (i % 5) {
      case 0: return ProxFunction::zero(dim);
      case 1: return ProxFunction::nonneg(dim);
      case 2: return ProxFunction::box(Vector::Constant(dim, -1.0), Vector::Constant(dim, 2.0));
      case 3: return ProxFunction::l1(0.1 + unit(rng), dim);
      default: return ProxFunction::linear_nonneg(random_point(rng, dim, 1.0));
    }
  };
  int nonexp = 0, membership = 0, fixed_point = 0, interp = 0;
  for (int i = 0; i < trials; ++i) {
    const Eigen::Index dim = 1 + i % 8;
    const ProxFunction h = random_h(i, dim);
    const double gamma = 0.05 + 2.0 * unit(rng);
    const Vector x = random_point(rng, dim, 3.0), y = random_point(rng, dim, 3.0);
    const Vector px = prox(h, gamma, x), py = prox(h, gamma, y);
    if ((px - py).norm() > (x - y).norm() + kPropertyTol * (1.0 + (x - y).norm())) ++nonexp;
    if (!subgradient_membership(h, px, (x - px) / gamma, kPropertyTol * (1.0 + x.norm() / gamma)))
      ++membership;

    const double mu = 0.1 + unit(rng), L = mu + 0.1 + 10.0 * unit(rng);
    const ClassParams p(mu, L);
    CompositeProblem problem(random_instance(p, dim, rng()), h);
    const Vector xs = problem.ensure_optimum().x;
    const Vector fp = prox(h, 1.0 / L, xs - eval_grad(problem.f, xs).grad / L);
    if ((fp - xs).norm() > kPropertyTol * (1.0 + xs.norm())) ++fixed_point;

    std::vector<Vector> pts;
    for (int j = 0; j < 4; ++j) pts.push_back(random_point(rng, dim, 3.0));
    double scale = 0.0;
    for (const auto& q : pts) scale = std::max(scale, std::abs(eval_grad(problem.f, q).value) + L * q.squaredNorm());
    if (check_interpolation(problem.f, p, pts) < -kPropertyTol * scale) ++interp;
  }
  return {nonexp + membership + fixed_point + interp == 0,
          "violations: nonexpansive " + std::to_string(nonexp) + ", membership " +
              std::to_string(membership) + ", fixed point " + std::to_string(fixed_point) +
              ", interpolation " + std::to_string(interp) + " (of " + std::to_string(trials) + " each)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 diagonal tightness", criterion1},     {"2 upper-bound envelope", criterion2},
      {"3 certificate verification", criterion3}, {"4 gamma=1/L mixed-measure values", criterion4},
      {"5 mu->0 limit", criterion5},            {"6 exact line search", criterion6},
      {"7 mixed-measure slacks", criterion7},   {"8 property suites", criterion8},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %s: %s (%s)\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
  }
  return failed;
}
