#pragma once

#include <algorithm>
#include <cmath>
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

class InfeasibleStart : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// One iterate with its gradient, the subgradient of h used to reach it and
/// the three performance measures (distance and residual stored squared).
struct IterateRecord {
  Vector x;
  Vector grad_f;
  std::optional<Vector> s;
  double F = 0.0;
  std::optional<double> dist_sq;
  std::optional<double> func_gap;
  std::optional<double> residual_grad_sq;

  std::optional<double> measure(Measure m) const {
    switch (m) {
      case Measure::DistanceSq: return dist_sq;
      case Measure::FuncGap: return func_gap;
      case Measure::ResidualGradSq: return residual_grad_sq;
    }
    return std::nullopt;
  }
};

struct IterateTrace {
  std::vector<IterateRecord> records;
  std::vector<double> gamma_used;
  CompositeProblem problem;
  /// Some step exceeded 2/L, where no guarantee applies.
  bool outside_theory = false;

  std::size_t iterations() const { return gamma_used.size(); }

  /// The common step size, if every step used the same one.
  std::optional<double> constant_step() const {
    if (gamma_used.empty()) return std::nullopt;
    for (double g : gamma_used)
      if (g != gamma_used.front()) return std::nullopt;
    return gamma_used.front();
  }
};

struct StepResult {
  Vector x_next;
  Vector s_next;
};

/// x+ = prox(x - gamma*g); s+ = (x - x+)/gamma - g is the subgradient of h at
/// x+ selected by the prox optimality condition.
inline StepResult pgm_step(const CompositeProblem& problem, double gamma, const Vector& x_k,
                           const Vector& grad_k) {
  if (!(gamma > 0.0)) throw std::invalid_argument("pgm_step: gamma must be positive");
  Vector x_next = prox(problem.h, gamma, x_k - gamma * grad_k);
  Vector s_next = (x_k - x_next) / gamma - grad_k;
  return {std::move(x_next), std::move(s_next)};
}

struct RunOptions {
  /// Subgradient of h at x0. Defaults to zero when h = 0.
  std::optional<Vector> s0;
  /// Fail instead of leaving the initial residual unset when s0 is unknown.
  bool require_initial_residual = false;
  /// Solve for the optimum when the problem does not carry one.
  bool compute_optimum = true;
};

namespace detail {

inline IterateRecord make_record(const CompositeProblem& problem, Vector x,
                                 std::optional<Vector> s) {
  IterateRecord r;
  auto vg = eval_grad(problem.f, x);
  r.grad_f = std::move(vg.grad);
  r.F = vg.value + value(problem.h, x);
  if (s) r.residual_grad_sq = (r.grad_f + *s).squaredNorm();
  if (problem.optimum) {
    r.dist_sq = (x - problem.optimum->x).squaredNorm();
    r.func_gap = r.F - problem.optimum->F;
  }
  r.x = std::move(x);
  r.s = std::move(s);
  return r;
}

inline std::optional<Vector> initial_subgradient(const CompositeProblem& problem, const Vector& x0,
                                                 const RunOptions& opt) {
  if (opt.s0) {
    if (!subgradient_membership(problem.h, x0, *opt.s0, 1e-9))
      throw std::invalid_argument("run: supplied s0 is not a subgradient of h at x0");
    return opt.s0;
  }
  if (problem.h.is_zero()) return Vector::Zero(x0.size());
  if (opt.require_initial_residual)
    throw std::invalid_argument(
        "run: the initial residual needs a subgradient s0 of h at x0 (dF(x0) nonempty)");
  return std::nullopt;
}

inline IterateTrace start_trace(CompositeProblem problem, const Vector& x0, const RunOptions& opt) {
  if (x0.size() != problem.dimension()) throw std::invalid_argument("run: x0 dimension mismatch");
  if (std::isinf(value(problem.h, x0)))
    throw InfeasibleStart("run: F(x0) = +inf, the starting point is infeasible");
  if (opt.compute_optimum) problem.ensure_optimum();
  auto s0 = initial_subgradient(problem, x0, opt);
  IterateTrace trace{{}, {}, std::move(problem), false};
  trace.records.push_back(make_record(trace.problem, x0, std::move(s0)));
  return trace;
}

inline void append_step(IterateTrace& trace, double gamma) {
  const IterateRecord& last = trace.records.back();
  auto [x_next, s_next] = pgm_step(trace.problem, gamma, last.x, last.grad_f);
  trace.gamma_used.push_back(gamma);
  if (gamma > 2.0 / trace.problem.params().L) trace.outside_theory = true;
  trace.records.push_back(make_record(trace.problem, std::move(x_next), std::move(s_next)));
}

}  // namespace detail

/// N fixed-step iterations from x0; N + 1 records.
inline IterateTrace run(CompositeProblem problem, double gamma, const Vector& x0, int N,
                        const RunOptions& opt = {}) {
  if (!(gamma > 0.0)) throw std::invalid_argument("run: gamma must be positive");
  if (N < 0) throw std::invalid_argument("run: N must be nonnegative");
  IterateTrace trace = detail::start_trace(std::move(problem), x0, opt);
  trace.records.reserve(static_cast<std::size_t>(N) + 1);
  for (int k = 0; k < N; ++k) detail::append_step(trace, gamma);
  return trace;
}

enum class SearchStatus { Ok, ClosedForm, AtOptimum, NonUnimodal };

inline std::string_view to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::Ok: return "ok";
    case SearchStatus::ClosedForm: return "closed_form";
    case SearchStatus::AtOptimum: return "at_optimum";
    case SearchStatus::NonUnimodal: return "non_unimodal";
  }
  return "?";
}

struct LineSearchResult {
  double gamma;
  Vector x_next;
  Vector s_next;
  double value;  // F(x_next)
  SearchStatus status;
};

struct LineSearchOptions {
  int grid_points = 400;
  double relative_width = 1e-12;
  int max_expansions = 20;
};

/// Minimizes phi(gamma) = F(prox(x - gamma*grad f(x))) over gamma > 0.
///
/// h = 0 with a quadratic f uses gamma = <g,g>/<g,Ag>. Otherwise a grid scan
/// of (0, 4/mu] (4/L when mu = 0), expanded while the minimum sits on the right
/// end, is refined by golden section around the best grid point. The optimal
/// fixed step 2/(L+mu) is always among the candidates, so the result never does
/// worse than it. Several separated local minima on the grid are reported as
/// NonUnimodal along with the best point found.
inline LineSearchResult exact_line_search_step(const CompositeProblem& problem, const Vector& x_k,
                                               const LineSearchOptions& opt = {}) {
  const ClassParams& p = problem.params();
  const Vector g = eval_grad(problem.f, x_k).grad;
  auto step_at = [&](double gamma) {
    auto [xn, sn] = pgm_step(problem, gamma, x_k, g);
    const double v = problem.F(xn);
    return LineSearchResult{gamma, std::move(xn), std::move(sn), v, SearchStatus::Ok};
  };

  const double gamma_opt = 2.0 / (p.L + p.mu);
  {
    // Fixed point of the prox-gradient map: x_k is optimal and phi is flat.
    auto probe = step_at(1.0 / p.L);
    if ((probe.x_next - x_k).norm() <= 1e-15 * (1.0 + x_k.norm())) {
      auto r = step_at(gamma_opt);
      r.status = SearchStatus::AtOptimum;
      return r;
    }
  }

  if (problem.h.is_zero()) {
    const double curv = g.dot(problem.f.hessian_times(g));
    if (curv > 0.0) {
      auto r = step_at(g.squaredNorm() / curv);
      r.status = SearchStatus::ClosedForm;
      return r;
    }
  }

  double upper = p.strongly_convex() ? 4.0 / p.mu : 4.0 / p.L;
  const int M = std::max(opt.grid_points, 8);
  std::vector<double> grid, phi;
  int best = 0;
  for (int expansion = 0;; ++expansion) {
    grid.assign(M, 0.0);
    phi.assign(M, 0.0);
    for (int i = 0; i < M; ++i) {
      grid[i] = upper * (i + 1) / M;
      phi[i] = problem.F(prox(problem.h, grid[i], x_k - grid[i] * g));
    }
    best = static_cast<int>(std::min_element(phi.begin(), phi.end()) - phi.begin());
    if (best < M - 1 || expansion >= opt.max_expansions) break;
    upper *= 2.0;
  }

  int local_minima = 0;
  for (int i = 0; i < M; ++i) {
    const bool left = (i == 0) || phi[i] < phi[i - 1];
    // Skip over a plateau to the next distinct value.
    int j = i + 1;
    while (j < M && phi[j] == phi[i]) ++j;
    const bool right = (j == M) || phi[i] < phi[j];
    if (left && right) ++local_minima;
  }

  double a = best > 0 ? grid[best - 1] : 0.0;
  double b = best < M - 1 ? grid[best + 1] : grid[best];
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  auto phi_at = [&](double t) { return problem.F(prox(problem.h, t, x_k - t * g)); };
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = phi_at(c), fd = phi_at(d);
  while (b - a > opt.relative_width * std::max(grid[best], 1e-300)) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = phi_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = phi_at(d);
    }
  }

  LineSearchResult chosen = step_at(0.5 * (a + b));
  for (double cand : {grid[best], gamma_opt}) {
    auto r = step_at(cand);
    if (r.value < chosen.value) chosen = std::move(r);
  }
  chosen.status = local_minima > 1 ? SearchStatus::NonUnimodal : SearchStatus::Ok;
  return chosen;
}

/// N exact-line-search iterations; the chosen steps land in gamma_used.
inline IterateTrace run_exact_line_search(CompositeProblem problem, const Vector& x0, int N,
                                          const RunOptions& opt = {},
                                          std::vector<SearchStatus>* statuses = nullptr) {
  if (N < 0) throw std::invalid_argument("run_exact_line_search: N must be nonnegative");
  IterateTrace trace = detail::start_trace(std::move(problem), x0, opt);
  for (int k = 0; k < N; ++k) {
    auto ls = exact_line_search_step(trace.problem, trace.records.back().x);
    if (statuses) statuses->push_back(ls.status);
    trace.gamma_used.push_back(ls.gamma);
    trace.records.push_back(
        detail::make_record(trace.problem, std::move(ls.x_next), std::move(ls.s_next)));
  }
  return trace;
}

struct ResidualSearchResult {
  double alpha;
  Vector x_next;
};

/// alpha = argmin |grad f(x + alpha*grad f(x))|, x+ = x + alpha*grad f(x).
/// Closed form for quadratics: alpha = -<g, Ag>/|Ag|^2.
inline ResidualSearchResult residual_line_search_step(const SmoothFunction& f, const Vector& x_k) {
  const Vector g = eval_grad(f, x_k).grad;
  const Vector Ag = f.hessian_times(g);
  const double denom = Ag.squaredNorm();
  if (denom == 0.0) return {0.0, x_k};
  const double alpha = -g.dot(Ag) / denom;
  return {alpha, x_k + alpha * g};
}

inline ResidualSearchResult residual_line_search_step(const CompositeProblem& problem,
                                                      const Vector& x_k) {
  if (!problem.h.is_zero())
    throw std::invalid_argument("residual line search is only supported for h = 0");
  return residual_line_search_step(problem.f, x_k);
}

}  // namespace pgm
