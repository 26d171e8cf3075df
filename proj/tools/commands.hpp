#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pgm/certificates.hpp"
#include "pgm/core_rates.hpp"
#include "pgm/mixed_measures.hpp"
#include "pgm/pgm_engine.hpp"
#include "pgm/rational.hpp"
#include "pgm/serialize.hpp"
#include "pgm/worstcase_gen.hpp"

namespace pgm::cli {

/// Malformed or inconsistent configuration; exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode { kOk = 0, kVerificationFailure = 1, kUsage = 2 };

struct RunConfig {
  std::string command;
  std::string mu = "1";
  std::string L = "10";
  std::string gamma = "opt";
  int N = 10;
  int dim = 5;
  std::uint64_t seed = 1;
  std::string h = "zero";
  std::string format = "json";
  std::string out;
  std::string grid;
  std::string generator;
  std::string target = "all";
  std::string x0;
  std::string c = "1/10";
  std::string theorem = "all";
  std::string regime = "auto";
  int mutate = -1;
  int k = 1;
  bool univariate = false;
  bool gamma_given = false;
  bool mu_given = false;
  bool L_given = false;

  Json to_json() const {
    Json j{{"mu", mu},   {"L", L},         {"gamma", gamma}, {"N", N},
           {"dim", dim}, {"seed", seed},   {"h", h},         {"format", format},
           {"k", k},     {"theorem", theorem}, {"regime", regime}};
    if (!grid.empty()) j["grid"] = grid;
    if (!generator.empty()) j["generator"] = generator;
    if (!x0.empty()) j["x0"] = x0;
    if (command == "tight" || generator == "unbounded") j["c"] = c;
    if (command == "tight" || generator == "appendix-b") j["target"] = target;
    if (mutate >= 0) j["mutate"] = mutate;
    if (univariate) j["univariate"] = true;
    return j;
  }
};

struct CommandResult {
  Json document;
  int exit_code = kOk;
};

// ---------------------------------------------------------------- parsing

/// Decimal or "p/q"; the simulation paths.
inline double parse_real(const std::string& text, const char* what) {
  try {
    if (text.find('/') != std::string::npos) return to_double(parse_rational(text));
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string("--") + what + ": not a number: '" + text + "'");
  }
}

/// Exact rational only; decimals are rejected rather than rounded.
inline Rational parse_exact(const std::string& text, const char* what) {
  try {
    return parse_rational(text);
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string("--") + what + ": expected an exact rational p or p/q, got '" +
                     text + "'");
  }
}

inline ClassParams parse_params(const RunConfig& cfg) {
  const double mu = parse_real(cfg.mu, "mu"), L = parse_real(cfg.L, "L");
  try {
    return ClassParams(mu, L);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

inline double parse_gamma(const RunConfig& cfg, const ClassParams& p) {
  if (cfg.gamma == "opt") return p.optimal_step();
  const double g = parse_real(cfg.gamma, "gamma");
  if (!(g > 0.0)) throw UsageError("--gamma must be positive");
  return g;
}

inline ProxFunction make_h(const std::string& kind, Eigen::Index dim) {
  if (kind == "zero") return ProxFunction::zero(dim);
  if (kind == "nonneg") return ProxFunction::nonneg(dim);
  if (kind == "box") return ProxFunction::box(Vector::Constant(dim, -1.0), Vector::Constant(dim, 1.0));
  if (kind == "l1") return ProxFunction::l1(1.0, dim);
  throw UsageError("--h must be one of zero, nonneg, box, l1");
}

inline ShiftedQuadraticTarget parse_target(const std::string& t) {
  if (t == "dist_to_func_gap") return ShiftedQuadraticTarget::DistToFuncGap;
  if (t == "dist_to_residual") return ShiftedQuadraticTarget::DistToResidual;
  if (t == "func_gap_to_residual") return ShiftedQuadraticTarget::FuncGapToResidual;
  throw UsageError("--target must be dist_to_func_gap, dist_to_residual or func_gap_to_residual");
}

inline std::string cell_name(Measure init, Measure fin) {
  return std::string(to_string(init)) + "->" + std::string(to_string(fin));
}

inline double relative_gap(double predicted, double attained) {
  return std::abs(attained - predicted) / std::max(std::abs(predicted), 1e-300);
}

// ---------------------------------------------------------------- rate

inline CommandResult cmd_rate(const RunConfig& cfg) {
  const ClassParams p = parse_params(cfg);
  int points = 200;
  if (!cfg.grid.empty()) {
    try {
      points = std::stoi(cfg.grid);
    } catch (const std::exception&) {
      throw UsageError("--grid for rate is the number of grid intervals on [0, 2/L]");
    }
    if (points < 1) throw UsageError("--grid must be positive");
  }
  std::vector<std::pair<double, std::string>> gammas;
  for (int i = 0; i <= points; ++i) gammas.emplace_back(2.0 / p.L * i / points, "");
  gammas.emplace_back(1.0 / p.L, "1/L");
  gammas.emplace_back(p.optimal_step(), "2/(L+mu)");
  if (p.strongly_convex()) gammas.emplace_back(1.0 / p.mu, "1/mu");
  gammas.emplace_back(2.0 / p.L, "2/L");
  std::stable_sort(gammas.begin(), gammas.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  Json rows = Json::array();
  for (const auto& [g, marker] : gammas) {
    const Rate r = rho(p, g);
    rows.push_back(Json{{"gamma", g},
                        {"rho", r.rho},
                        {"rho_sq", r.rho_squared},
                        {"branch", rate_branch(p, g) == RateBranch::Mu ? "mu" : "L"},
                        {"marker", marker}});
  }
  const auto best = std::min_element(rows.begin(), rows.end(), [](const Json& a, const Json& b) {
    return a["rho_sq"].get<double>() < b["rho_sq"].get<double>();
  });
  Json verdict{{"ok", true}, {"argmin_gamma", (*best)["gamma"]}, {"min_rho_sq", (*best)["rho_sq"]}};
  return {Json{{"rows", std::move(rows)}, {"verdict", std::move(verdict)}}, kOk};
}

// ---------------------------------------------------------------- simulate

struct Instance {
  CompositeProblem problem;
  Vector x0;
  std::optional<Vector> s0;
  std::optional<double> gamma;  // forced by the generator
  bool line_search = false;
};

inline Instance make_instance(const RunConfig& cfg, const ClassParams& p, double gamma) {
  const std::string gen = cfg.generator.empty() ? "random" : cfg.generator;
  if (cfg.dim < 1) throw UsageError("--dim must be positive");
  if (gen == "random") {
    CompositeProblem prob(random_instance(p, cfg.dim, cfg.seed), make_h(cfg.h, cfg.dim));
    const Optimum& opt = prob.ensure_optimum();
    Vector x0;
    if (cfg.x0 == "opt") {
      x0 = opt.x;
    } else if (cfg.x0.empty()) {
      std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
      std::normal_distribution<double> normal(0.0, 1.0);
      x0.resize(cfg.dim);
      for (auto& v : x0) v = 2.0 * normal(rng);
      // Into dom h.
      if (cfg.h == "nonneg") x0 = x0.cwiseAbs();
      if (cfg.h == "box") x0 = x0.cwiseMax(-1.0).cwiseMin(1.0);
    } else {
      x0 = Vector::Constant(cfg.dim, parse_real(cfg.x0, "x0"));
    }
    if (std::isinf(prob.F(x0))) throw UsageError("--x0 lies outside dom h");
    Vector s0 = closest_subgradient(prob.h, x0, -eval_grad(prob.f, x0).grad);
    return {std::move(prob), std::move(x0), std::move(s0), std::nullopt, false};
  }
  WorstCaseSpec spec = [&]() -> WorstCaseSpec {
    try {
      if (gen == "qlb") return quadratic_lower_bound(p, gamma, cfg.dim, cfg.N);
      if (gen == "appendix-b")
        return appendix_b_instance(p, cfg.N, cfg.x0.empty() ? 1.0 : parse_real(cfg.x0, "x0"),
                                   parse_target(cfg.target == "all" ? "dist_to_func_gap"
                                                                    : cfg.target));
      if (gen == "els") return els_worst_quadratic(p, cfg.N);
      if (gen == "unbounded")
        return unbounded_family(parse_real(cfg.c, "c"),
                                cfg.x0.empty() ? 1.0 : parse_real(cfg.x0, "x0"), cfg.N, p.L);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    } catch (const std::domain_error& e) {
      throw UsageError(e.what());
    }
    throw UsageError("--generator must be random, qlb, appendix-b, els or unbounded");
  }();
  const bool forced = gen == "appendix-b" || gen == "unbounded";
  return {spec.problem, spec.x0, spec.s0, forced ? spec.gamma : std::nullopt, gen == "els"};
}

inline std::string ratio_key(Measure m) { return "ratio_" + std::string(to_string(m)); }

inline CommandResult cmd_simulate(const RunConfig& cfg) {
  const ClassParams p = parse_params(cfg);
  if (cfg.N < 0) throw UsageError("--N must be nonnegative");
  const bool els_requested = cfg.gamma == "els";
  const double gamma_arg = els_requested ? p.optimal_step() : parse_gamma(cfg, p);
  Instance inst = make_instance(cfg, p, gamma_arg);
  const bool line_search = els_requested || inst.line_search;
  const double gamma = inst.gamma.value_or(gamma_arg);
  const ClassParams& q = inst.problem.params();

  RunOptions opt;
  opt.s0 = inst.s0;
  const IterateTrace trace = line_search
                                 ? run_exact_line_search(inst.problem, inst.x0, cfg.N, opt)
                                 : run(inst.problem, gamma, inst.x0, cfg.N, opt);
  const double rate_sq = line_search ? optimal_step(q).rate.rho_squared : rho(q, gamma).rho_squared;

  Json rows = Json::array();
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const auto& r = trace.records[k];
    Json row{{"k", k},
             {"gamma", k == 0 ? Json(nullptr) : Json(trace.gamma_used[k - 1])},
             {"F", detail::number(r.F)},
             {"dist_sq", detail::number(r.dist_sq)},
             {"func_gap", detail::number(r.func_gap)},
             {"residual_grad_sq", detail::number(r.residual_grad_sq)}};
    for (Measure m : kAllMeasures) {
      std::optional<double> ratio;
      if (k > 0) {
        const auto prev = trace.records[k - 1].measure(m), cur = r.measure(m);
        if (prev && cur && *prev > 0.0) ratio = *cur / *prev;
      }
      row[ratio_key(m)] = detail::number(ratio);
    }
    row["envelope_rho_sq"] = rate_sq;
    rows.push_back(std::move(row));
  }

  // Only the function value is guaranteed under exact line search.
  auto checks = per_step_contraction(trace, rate_sq);
  if (line_search)
    checks.erase(std::remove_if(checks.begin(), checks.end(),
                                [](const StepCheck& c) { return c.measure != Measure::FuncGap; }),
                 checks.end());
  const bool checked = !trace.outside_theory;
  const auto violations =
      checked ? std::count_if(checks.begin(), checks.end(), [](const StepCheck& c) { return !c.ok; })
              : 0;
  Json verdict{{"ok", violations == 0},
               {"checked", checked},
               {"envelope_rho_sq", rate_sq},
               {"violations", violations},
               {"outside_theory", trace.outside_theory},
               {"line_search", line_search}};
  return {Json{{"rows", std::move(rows)}, {"verdict", std::move(verdict)}, {"trace", to_json(trace)}},
          violations == 0 ? kOk : kVerificationFailure};
}

// ---------------------------------------------------------------- tight

inline CommandResult cmd_tight(const RunConfig& cfg) {
  constexpr double kGapTol = 1e-8;
  const ClassParams p = parse_params(cfg);
  if (cfg.N < 1) throw UsageError("--N must be >= 1");
  const std::string gen = cfg.generator.empty() ? "qlb" : cfg.generator;
  Json rows = Json::array();
  double worst_gap = 0.0;
  auto add_row = [&](const std::string& cell, double predicted, double attained, Json extra = {}) {
    const double gap = relative_gap(predicted, attained);
    worst_gap = std::max(worst_gap, gap);
    Json row{{"cell", cell}, {"predicted", predicted}, {"attained", attained}, {"relative_gap", gap}};
    if (extra.is_object()) row.update(extra);
    rows.push_back(std::move(row));
  };

  try {
    if (gen == "qlb") {
      const double gamma = parse_gamma(cfg, p);
      const auto spec = quadratic_lower_bound(p, gamma, cfg.dim, cfg.N);
      const auto trace = run(spec.problem, gamma, spec.x0, cfg.N, RunOptions{spec.s0});
      for (Measure m : kAllMeasures) {
        const double attained = *trace.records.back().measure(m) / *trace.records.front().measure(m);
        add_row(cell_name(m, m), spec.predicted.at({m, m}).value, attained);
      }
    } else if (gen == "appendix-b") {
      if (cfg.gamma_given && cfg.gamma != "opt" &&
          std::abs(parse_real(cfg.gamma, "gamma") * p.L - 1.0) > 1e-12)
        throw UsageError("appendix-b instances are defined for gamma = 1/L only");
      if (cfg.gamma_given && cfg.gamma == "opt")
        throw UsageError("appendix-b instances are defined for gamma = 1/L only");
      const double x0 = cfg.x0.empty() ? 1.0 : parse_real(cfg.x0, "x0");
      std::vector<ShiftedQuadraticTarget> targets;
      if (cfg.target == "all")
        targets = {ShiftedQuadraticTarget::DistToFuncGap, ShiftedQuadraticTarget::DistToResidual,
                   ShiftedQuadraticTarget::FuncGapToResidual};
      else
        targets = {parse_target(cfg.target)};
      for (auto t : targets) {
        const auto spec = appendix_b_instance(p, cfg.N, x0, t);
        const auto trace = run(spec.problem, *spec.gamma, spec.x0, cfg.N, RunOptions{spec.s0});
        const auto [init, fin] = cell_of(t);
        double max_iter_err = 0.0;
        for (int k = 0; k <= cfg.N; ++k)
          max_iter_err = std::max(max_iter_err, std::abs(trace.records[k].x[0] -
                                                         (*spec.closed_form_iterates)[k][0]));
        add_row(cell_name(init, fin), spec.predicted.at({init, fin}).value,
                *trace.records.back().measure(fin),
                Json{{"c", *spec.c}, {"max_iterate_error", max_iter_err}});
      }
    } else if (gen == "els") {
      const auto spec = els_worst_quadratic(p, cfg.N);
      const auto trace = run_exact_line_search(spec.problem, spec.x0, cfg.N);
      const double predicted = spec.predicted.at({Measure::FuncGap, Measure::FuncGap}).value;
      for (int k = 0; k < cfg.N; ++k) {
        const double prev = *trace.records[k].func_gap, next = *trace.records[k + 1].func_gap;
        add_row("func_gap_step_" + std::to_string(k), predicted, next / prev,
                Json{{"gamma", trace.gamma_used[k]}});
      }
    } else if (gen == "unbounded") {
      const double c = parse_real(cfg.c, "c");
      const double x0 = cfg.x0.empty() ? 1.0 : parse_real(cfg.x0, "x0");
      if (!(x0 > 0.0)) throw UsageError("unbounded witness ratios need x0 > 0");
      for (double cc : {c, c / 10.0}) {
        const auto spec = unbounded_family(cc, x0, cfg.N, p.L);
        const auto trace = run(spec.problem, *spec.gamma, spec.x0, cfg.N, RunOptions{spec.s0});
        for (const auto& [cell, pred] : spec.predicted) {
          const double attained = *trace.records.back().measure(cell.second) /
                                  *trace.records.front().measure(cell.first);
          add_row(cell_name(cell.first, cell.second), pred.value, attained,
                  Json{{"c", cc}, {"limit_bound", "Unbounded"}});
        }
      }
    } else {
      throw UsageError("--generator must be qlb, appendix-b, els or unbounded");
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  const bool ok = worst_gap <= kGapTol;
  Json verdict{{"ok", ok}, {"max_relative_gap", worst_gap}, {"tolerance", kGapTol}};
  return {Json{{"rows", std::move(rows)}, {"verdict", std::move(verdict)}},
          ok ? kOk : kVerificationFailure};
}

// ---------------------------------------------------------------- certify

inline std::vector<Theorem> parse_theorems(const std::string& t) {
  if (t == "all") return {Theorem::Distance, Theorem::Residual, Theorem::FuncValue};
  try {
    return {theorem_from_string(t)};
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

inline CommandResult cmd_certify(const RunConfig& cfg) {
  const auto theorems = parse_theorems(cfg.theorem);
  Json rows = Json::array();
  bool all_verified = true;

  const bool point_mode = cfg.mu_given || cfg.L_given || cfg.gamma_given;
  const Rational mu = parse_exact(cfg.mu, "mu"), L = parse_exact(cfg.L, "L");
  if (point_mode || cfg.univariate) {
    if (!(mu < L) || mu < 0) throw UsageError("certificates need 0 <= mu < L");
  }

  if (cfg.univariate) {
    std::vector<Regime> regimes{Regime::SmallStep, Regime::LargeStep};
    if (cfg.regime != "auto") regimes = {regime_from_string(cfg.regime)};
    for (Theorem t : theorems)
      for (Regime r : regimes) {
        const auto rep = verify_univariate(t, mu, L, r);
        all_verified = all_verified && rep.verified;
        rows.push_back(to_json(rep));
      }
  } else {
    std::vector<GridPoint> grid;
    if (point_mode) {
      const Rational gamma = cfg.gamma == "opt" ? Rational(2 / (L + mu)) : parse_exact(cfg.gamma, "gamma");
      if (!(gamma > 0) || gamma > 2 / L) throw UsageError("--gamma must lie in (0, 2/L]");
      std::vector<Regime> regimes = regimes_for(mu, L, gamma);
      if (cfg.regime != "auto") {
        try {
          regimes = {regime_from_string(cfg.regime)};
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
      }
      for (Regime r : regimes) grid.push_back({mu, L, gamma, r});
    } else if (cfg.grid.empty() || cfg.grid == "default") {
      grid = default_certificate_grid();
    } else if (cfg.grid == "spec") {
      grid = certificate_grid({Rational(1, 10), Rational(1, 2), Rational(9, 10)},
                              {Rational(1), Rational(3), Rational(10)});
    } else {
      throw UsageError("--grid for certify is 'default' or 'spec'");
    }

    if (cfg.mutate >= 0) {
      // Test hook: perturb one multiplier (or SOS coefficient past the
      // multipliers) by 1/1000 at every grid point.
      for (Theorem t : theorems)
        for (const auto& gp : grid) {
          auto c = build_certificate(t, gp.mu, gp.L, gp.gamma, gp.regime);
          const std::size_t i = static_cast<std::size_t>(cfg.mutate);
          if (i < c.inequalities.size())
            c.inequalities[i].multiplier += Rational(1, 1000);
          else if (i - c.inequalities.size() < c.sos.size())
            c.sos[i - c.inequalities.size()].coefficient += Rational(1, 1000);
          else
            throw UsageError("--mutate index out of range");
          auto rep = check(c);
          all_verified = all_verified && rep.verified;
          Json j = to_json(rep);
          j["mutated_index"] = cfg.mutate;
          rows.push_back(std::move(j));
        }
    } else {
      for (const auto& rep : verify_grid(theorems, grid)) {
        all_verified = all_verified && rep.verified;
        rows.push_back(to_json(rep));
      }
    }
  }
  const auto unverified = std::count_if(rows.begin(), rows.end(),
                                        [](const Json& r) { return !r["verified"].get<bool>(); });
  Json verdict{{"ok", all_verified}, {"reports", rows.size()}, {"unverified", unverified}};
  return {Json{{"rows", std::move(rows)}, {"verdict", std::move(verdict)}},
          all_verified ? kOk : kVerificationFailure};
}

// ---------------------------------------------------------------- tables

inline std::string formula(int table, Measure init, Measure fin) {
  using M = Measure;
  if (table == 3) {
    if (init == fin) return "1";
    if (init == M::DistanceSq && fin == M::FuncGap) return "L/(4k)";
    if (init == M::DistanceSq && fin == M::ResidualGradSq) return "L^2/k^2";
    if (init == M::FuncGap && fin == M::ResidualGradSq) return "L/k";
    return "Unbounded";
  }
  if (init == fin) return "rho^(2k)";
  if (init == M::FuncGap && fin == M::DistanceSq) return "(2/mu) rho^(2k)";
  if (init == M::ResidualGradSq && fin == M::DistanceSq) return "rho^(2k)/mu^2";
  if (init == M::ResidualGradSq && fin == M::FuncGap) return "rho^(2k)/(2mu)";
  if (table == 2) {
    if (init == M::DistanceSq && fin == M::FuncGap) return "(mu/2)/(rho^(-2k)-1)";
    if (init == M::DistanceSq && fin == M::ResidualGradSq) return "mu^2/(rho^(-k)-1)^2";
    if (init == M::FuncGap && fin == M::ResidualGradSq) return "2mu/(rho^(-2k)-1)";
  }
  return "no known bound";
}

inline CommandResult cmd_tables(const RunConfig& cfg) {
  const ClassParams p = parse_params(cfg);
  if (cfg.k < 1) throw UsageError("--k must be >= 1");
  const double gamma = cfg.gamma == "opt" ? p.optimal_step() : parse_gamma(cfg, p);
  Json rows = Json::array();
  auto emit = [&](int table, const ClassParams& params, double g, bool conjectured) {
    for (Measure init : kAllMeasures)
      for (Measure fin : kAllMeasures) {
        Json row{{"table", table},       {"init", to_string(init)}, {"final", to_string(fin)},
                 {"mu", params.mu},      {"L", params.L},           {"gamma", g},
                 {"k", cfg.k},           {"formula", formula(table, init, fin)}};
        try {
          const BoundValue b = bound_lookup(init, fin, params, g, cfg.k, conjectured);
          row["value"] = b.unbounded ? Json(nullptr) : detail::number(b.value);
          row["display"] = b.unbounded ? "Unbounded" : row["formula"];
          row["provenance"] = to_string(b.provenance);
        } catch (const NoKnownBound&) {
          row["value"] = nullptr;
          row["display"] = "no known bound";
          row["provenance"] = nullptr;
        }
        rows.push_back(std::move(row));
      }
  };
  if (p.strongly_convex()) {
    emit(1, p, gamma, false);
    emit(2, p, 1.0 / p.L, true);
  }
  emit(3, ClassParams(0.0, p.L), 1.0 / p.L, false);
  return {Json{{"rows", std::move(rows)}, {"verdict", Json{{"ok", true}}}}, kOk};
}

// ---------------------------------------------------------------- output

namespace detail {

inline void flatten(const Json& j, const std::string& prefix, std::map<std::string, std::string>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    std::string joined;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) joined += ";";
      joined += j[i].is_string() ? j[i].get<std::string>() : j[i].dump();
    }
    out[prefix] = joined;
  } else if (j.is_string()) {
    out[prefix] = j.get<std::string>();
  } else if (j.is_null()) {
    out[prefix] = "";
  } else {
    out[prefix] = j.dump();
  }
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

}  // namespace detail

/// JSON: the whole document. CSV: the rows array, one header line with the
/// union of (dotted) field names, sorted within each row and
/// appended in first-seen order across rows.
inline std::string render(const Json& doc, const std::string& format) {
  if (format == "json") return doc.dump(2) + "\n";
  std::vector<std::map<std::string, std::string>> flat;
  std::vector<std::string> header;
  for (const auto& row : doc.at("rows")) {
    std::map<std::string, std::string> f;
    detail::flatten(row, "", f);
    for (const auto& [k, v] : f)
      if (std::find(header.begin(), header.end(), k) == header.end()) header.push_back(k);
    flat.push_back(std::move(f));
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << detail::csv_escape(header[i]);
  os << "\n";
  for (const auto& f : flat) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      const auto it = f.find(header[i]);
      os << (i ? "," : "") << (it == f.end() ? "" : detail::csv_escape(it->second));
    }
    os << "\n";
  }
  return os.str();
}

inline CommandResult run_command(const RunConfig& cfg) {
  CommandResult r;
  if (cfg.command == "rate") r = cmd_rate(cfg);
  else if (cfg.command == "simulate") r = cmd_simulate(cfg);
  else if (cfg.command == "tight") r = cmd_tight(cfg);
  else if (cfg.command == "certify") r = cmd_certify(cfg);
  else if (cfg.command == "tables") r = cmd_tables(cfg);
  else throw UsageError("unknown command: " + cfg.command);
  Json doc{{"command", cfg.command}, {"config", cfg.to_json()}};
  doc.update(r.document);
  r.document = std::move(doc);
  return r;
}

/// Full CLI entry point; returns the process exit status.
inline int main_entry(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Proximal gradient worst-case rates: simulation, tightness and certificates", "pgm"};
  app.require_subcommand(1);
  RunConfig cfg;

  // -h would clash with --h, the nonsmooth term.
  app.set_help_flag("--help", "print this help");
  auto add_common = [&](CLI::App* sub) {
    sub->set_help_flag("--help", "print this help");
    sub->add_option("--mu", cfg.mu, "strong convexity constant (decimal or p/q)");
    sub->add_option("--L", cfg.L, "smoothness constant (decimal or p/q)");
    sub->add_option("--gamma", cfg.gamma, "step size, p/q, decimal, 'opt' = 2/(L+mu), or 'els'");
    sub->add_option("--N", cfg.N, "iteration count");
    sub->add_option("--dim", cfg.dim, "dimension of random instances");
    sub->add_option("--seed", cfg.seed, "random seed");
    sub->add_option("--h", cfg.h, "nonsmooth term")->check(CLI::IsMember({"zero", "nonneg", "box", "l1"}));
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out, "output path (stdout if absent)");
    sub->add_option("--grid", cfg.grid, "grid specification");
  };

  CLI::App* rate = app.add_subcommand("rate", "rho^2(gamma) over a step-size grid");
  CLI::App* simulate = app.add_subcommand("simulate", "run PGM and report per-step ratios");
  CLI::App* tight = app.add_subcommand("tight", "attained vs predicted worst cases");
  CLI::App* certify = app.add_subcommand("certify", "verify the rate certificates exactly");
  CLI::App* tables = app.add_subcommand("tables", "the three bound tables");
  for (CLI::App* sub : {rate, simulate, tight, certify, tables}) add_common(sub);
  for (CLI::App* sub : {simulate, tight}) {
    sub->add_option("--generator", cfg.generator, "random, qlb, appendix-b, els, unbounded");
    sub->add_option("--target", cfg.target, "appendix-b cell");
    sub->add_option("--x0", cfg.x0, "starting point (scalar or 'opt')");
    sub->add_option("--c", cfg.c, "linear coefficient of the unbounded family");
  }
  certify->add_option("--theorem", cfg.theorem, "distance, residual, funcvalue or all");
  certify->add_option("--regime", cfg.regime, "small, large or auto");
  certify->add_option("--mutate", cfg.mutate, "perturb coefficient i by 1/1000 (test hook)");
  certify->add_flag("--univariate", cfg.univariate, "treat gamma as an indeterminate");
  tables->add_option("--k", cfg.k, "iteration index");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kUsage;
  }
  for (CLI::App* sub : {rate, simulate, tight, certify, tables})
    if (sub->parsed()) {
      cfg.command = sub->get_name();
      cfg.gamma_given = sub->count("--gamma") > 0;
      cfg.mu_given = sub->count("--mu") > 0;
      cfg.L_given = sub->count("--L") > 0;
    }

  try {
    const CommandResult r = run_command(cfg);
    const std::string text = render(r.document, cfg.format);
    if (cfg.out.empty()) {
      out << text;
    } else {
      std::ofstream f(cfg.out);
      if (!f) {
        err << "cannot open " << cfg.out << "\n";
        return kUsage;
      }
      f << text;
    }
    return r.exit_code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace pgm::cli
