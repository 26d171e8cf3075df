#pragma once

#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pgm/interpolation.hpp"
#include "pgm/polynomial.hpp"
#include "pgm/rational.hpp"
#include "pgm/symbolic.hpp"

namespace pgm {

enum class Theorem { Distance, Residual, FuncValue };
enum class Regime { SmallStep, LargeStep };

inline std::string_view to_string(Theorem t) {
  switch (t) {
    case Theorem::Distance: return "distance";
    case Theorem::Residual: return "residual";
    case Theorem::FuncValue: return "funcvalue";
  }
  return "?";
}

inline std::string_view to_string(Regime r) {
  return r == Regime::SmallStep ? "small_step" : "large_step";
}

inline Theorem theorem_from_string(std::string_view s) {
  if (s == "distance" || s == "dist") return Theorem::Distance;
  if (s == "residual" || s == "res") return Theorem::Residual;
  if (s == "funcvalue" || s == "func" || s == "func_gap") return Theorem::FuncValue;
  throw std::invalid_argument("unknown theorem: " + std::string(s));
}

inline Regime regime_from_string(std::string_view s) {
  if (s == "small" || s == "small_step") return Regime::SmallStep;
  if (s == "large" || s == "large_step") return Regime::LargeStep;
  throw std::invalid_argument("unknown regime: " + std::string(s));
}

/// The construction hits a zero denominator (alpha(gamma) = 0 in the
/// function-value certificate, only possible in the wrong regime).
class DegenerateCertificate : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

template <class Field>
struct WeightedInequality {
  std::string name;
  Field multiplier;
  SymbolicExpr<Field> inequality;  // canonical, >= 0 on the class
};

template <class Field>
struct SosTerm {
  std::string name;
  Field coefficient;
  LinearCombination<Field> combination;
};

template <class Field>
struct SideCondition {
  std::string name;
  Field value;  // required >= 0
};

/// Claimed identity target = sum_i lambda_i E_i + sum_j c_j |v_j|^2 with
/// lambda, c >= 0 and E_i >= 0, so target >= 0. Every field is public so that
/// tests and the CLI can perturb a single coefficient.
template <class Field>
struct Certificate {
  Theorem theorem;
  Regime regime;
  Rational mu;
  Rational L;
  Field gamma;
  Field rho;
  SymbolicExpr<Field> target;
  std::vector<WeightedInequality<Field>> inequalities;
  std::vector<SosTerm<Field>> sos;
  std::vector<SideCondition<Field>> side_conditions;

  SymbolicExpr<Field> weighted_sum() const {
    SymbolicExpr<Field> s;
    for (const auto& w : inequalities) s += w.multiplier * w.inequality;
    return s;
  }

  SymbolicExpr<Field> sos_sum() const {
    SymbolicExpr<Field> s;
    for (const auto& t : sos) s += t.coefficient * sq_norm(substitute(t.combination, gamma));
    return s;
  }

  /// target - sum lambda E - sum c |v|^2; identically zero iff the proof holds.
  SymbolicExpr<Field> residual() const {
    return substitute(target, gamma) - weighted_sum() - sos_sum();
  }
};

namespace detail {

template <class Field>
void check_certificate_params(const Rational& mu, const Rational& L) {
  if (mu < 0) throw std::invalid_argument("certificate: mu must be nonnegative");
  if (!(mu < L)) throw std::invalid_argument("certificate: mu < L required (mu = L is excluded)");
}

template <class Field>
Field regime_rho(const Rational& mu, const Rational& L, const Field& gamma, Regime r) {
  return r == Regime::SmallStep ? Field(1) - gamma * Field(mu) : gamma * Field(L) - Field(1);
}

template <class Field>
LinearCombination<Field> v(VectorSymbol s) {
  return LinearCombination<Field>::of(s);
}

}  // namespace detail

/// |x_{k+1} - x_*|^2 <= rho^2 |x_k - x_*|^2.
template <class Field>
Certificate<Field> distance_certificate(const Rational& mu, const Rational& L, const Field& gamma,
                                        Regime regime) {
  detail::check_certificate_params<Field>(mu, L);
  using VS = VectorSymbol;
  using PL = PointLabel;
  auto V = [](VS s) { return detail::v<Field>(s); };
  const Field m(mu), l(L), g = gamma, two(2);
  const Field rho = detail::regime_rho(mu, L, gamma, regime);
  Certificate<Field> c{Theorem::Distance, regime, mu, L, gamma, rho, {}, {}, {}, {}};
  c.target = rho * rho * sq_norm(V(VS::X)) - sq_norm(V(VS::Xk1));
  c.inequalities = {
      {"lambda0 f(*,k)", two * g * rho, interp_smooth(PL::Star, PL::K, mu, L, g)},
      {"lambda1 f(k,*)", two * g * rho, interp_smooth(PL::K, PL::Star, mu, L, g)},
      {"lambda2 h(*,k+1)", two * g, interp_convex(PL::Star, PL::K1, g)},
      {"lambda3 h(k+1,*)", two * g, interp_convex(PL::K1, PL::Star, g)},
  };
  c.sos.push_back({"gs+sk1", g * g, V(VS::Gs) + V(VS::Sk1)});
  if (regime == Regime::SmallStep) {
    c.sos.push_back({"mu*X-gk+gs", g * (two - g * (l + m)) / (l - m),
                     m * V(VS::X) - V(VS::Gk) + V(VS::Gs)});
  } else {
    c.sos.push_back({"L*X-gk+gs", g * (g * (l + m) - two) / (l - m),
                     l * V(VS::X) - V(VS::Gk) + V(VS::Gs)});
  }
  return c;
}

/// |g_{k+1} + s_{k+1}|^2 <= rho^2 |g_k + s_k|^2.
template <class Field>
Certificate<Field> residual_certificate(const Rational& mu, const Rational& L, const Field& gamma,
                                        Regime regime) {
  detail::check_certificate_params<Field>(mu, L);
  using VS = VectorSymbol;
  using PL = PointLabel;
  auto V = [](VS s) { return detail::v<Field>(s); };
  const Field m(mu), l(L), g = gamma, two(2);
  const Field rho = detail::regime_rho(mu, L, gamma, regime);
  Certificate<Field> c{Theorem::Residual, regime, mu, L, gamma, rho, {}, {}, {}, {}};
  c.target = rho * rho * sq_norm(V(VS::Gk) + V(VS::Sk)) - sq_norm(V(VS::Gk1) + V(VS::Sk1));
  c.inequalities = {
      {"lambda0 f(k,k+1)", two * rho / g, interp_smooth(PL::K, PL::K1, mu, L, g)},
      {"lambda1 f(k+1,k)", two * rho / g, interp_smooth(PL::K1, PL::K, mu, L, g)},
      {"lambda2 h(k,k+1)", two * rho * rho / g, interp_convex(PL::K, PL::K1, g)},
      {"lambda3 h(k+1,k)", two * rho * rho / g, interp_convex(PL::K1, PL::K, g)},
  };
  c.sos.push_back({"sk-sk1", rho * rho, V(VS::Sk) - V(VS::Sk1)});
  const auto step = V(VS::Gk) + V(VS::Sk1);
  if (regime == Regime::SmallStep) {
    c.sos.push_back({"gk-gk1-mu*g*(gk+sk1)", (two - g * (l + m)) / (g * (l - m)),
                     V(VS::Gk) - V(VS::Gk1) - (m * g) * step});
  } else {
    c.sos.push_back({"gk-gk1-L*g*(gk+sk1)", (g * (l + m) - two) / (g * (l - m)),
                     V(VS::Gk) - V(VS::Gk1) - (l * g) * step});
  }
  return c;
}

template <class Field>
Field alpha_small(const Rational& mu, const Rational& L, const Field& gamma) {
  const Field m(mu), l(L), g = gamma, two(2);
  return -(g * g * l * l * m + two * l * (g * m - two) + m * (g * m - two) * (g * m - two));
}

template <class Field>
Field alpha_large(const Rational& mu, const Rational& L, const Field& gamma) {
  const Field m(mu), l(L), g = gamma, two(2);
  return -two * l * l - two * m * m + two * l * m + g * l * l * l + g * l * m * m;
}

template <class Field>
Field beta_of(const Rational& mu, const Rational& L, const Field& gamma, Regime r) {
  const Field s = gamma * Field(L + mu);
  return r == Regime::SmallStep ? Field(2) - s : s - Field(2);
}

/// F(x_{k+1}) - F_* <= rho^2 (F(x_k) - F_*). `beta_override` replaces beta
/// everywhere it enters (mutation hook).
template <class Field>
Certificate<Field> funcvalue_certificate(const Rational& mu, const Rational& L, const Field& gamma,
                                         Regime regime,
                                         const std::optional<Field>& beta_override = std::nullopt) {
  detail::check_certificate_params<Field>(mu, L);
  if (!(mu > 0)) throw std::invalid_argument("funcvalue certificate requires mu > 0");
  using VS = VectorSymbol;
  using PL = PointLabel;
  using E = SymbolicExpr<Field>;
  auto V = [](VS s) { return detail::v<Field>(s); };
  const Field m(mu), l(L), g = gamma, one(1), two(2);
  const Field rho = detail::regime_rho(mu, L, gamma, regime);
  Certificate<Field> c{Theorem::FuncValue, regime, mu, L, gamma, rho, {}, {}, {}, {}};

  auto F = [](ScalarSymbol f, ScalarSymbol h) { return E::symbol(f) + E::symbol(h); };
  const E Fk = F(ScalarSymbol::Fk, ScalarSymbol::Hk);
  const E Fk1 = F(ScalarSymbol::Fk1, ScalarSymbol::Hk1);
  const E Fs = F(ScalarSymbol::Fs, ScalarSymbol::Hs);
  c.target = rho * rho * (Fk - Fs) - (Fk1 - Fs);
  c.inequalities = {
      {"lambda0 f(k,k+1)", rho, interp_smooth(PL::K, PL::K1, mu, L, g)},
      {"lambda1 f(*,k)", (one - rho) * rho, interp_smooth(PL::Star, PL::K, mu, L, g)},
      {"lambda2 f(*,k+1)", one - rho, interp_smooth(PL::Star, PL::K1, mu, L, g)},
      {"lambda3 h(k,k+1)", rho * rho, interp_convex(PL::K, PL::K1, g)},
      {"lambda4 h(*,k+1)", one - rho * rho, interp_convex(PL::Star, PL::K1, g)},
  };

  const Field alpha =
      regime == Regime::SmallStep ? alpha_small(mu, L, gamma) : alpha_large(mu, L, gamma);
  const Field beta = beta_override ? *beta_override : beta_of(mu, L, gamma, regime);
  c.side_conditions = {{"alpha", alpha}, {"beta", beta}};
  if (is_zero(alpha)) throw DegenerateCertificate("funcvalue certificate: alpha(gamma) = 0");

  if (regime == Regime::SmallStep) {
    const Field q = two - g * m;  // 2 - gamma mu
    c.sos.push_back({"T1", q * beta / (two * alpha),
                     (one - g * m) * V(VS::Gk) - V(VS::Gk1) + (m * g) * V(VS::Gs)});
    c.sos.push_back({"T2", g * l * m * m * q / (two * (l - m)),
                     V(VS::X) - ((two * l - two * m + g * m * m) / (l * m * q)) * V(VS::Sk1) -
                         (one / (m * q)) * (V(VS::Gk) + V(VS::Gk1)) + (one / l) * V(VS::Gs)});
    c.sos.push_back({"T3", g * m * alpha / (two * l * (l - m) * q),
                     V(VS::Sk1) + ((m * g - one) * l * beta / alpha) * V(VS::Gk) +
                         (l * beta / alpha) * V(VS::Gk1) +
                         ((l - m) * q * q / alpha) * V(VS::Gs)});
  } else {
    const Field q = two - g * l;  // 2 - gamma L
    c.sos.push_back({"T1", q * beta / (two * g * alpha),
                     (one - g * l) * V(VS::Gk) - V(VS::Gk1) + (g * l) * V(VS::Gs)});
    c.sos.push_back({"T2", g * l * l * m * q / (two * (l - m)),
                     V(VS::X) - (one / m) * V(VS::Sk1) +
                         ((one - g * l - g * m) / (g * l * m)) * V(VS::Gk) -
                         (one / (g * l * m)) * V(VS::Gk1) + (one / l) * V(VS::Gs)});
    c.sos.push_back({"T3", g * alpha / (two * m * (l - m)),
                     V(VS::Sk1) + ((g * l - one) * l * beta / (g * alpha)) * V(VS::Gk) +
                         (l * beta / (g * alpha)) * V(VS::Gk1) +
                         (q * (l - m) * m / alpha) * V(VS::Gs)});
  }
  return c;
}

struct NamedValue {
  std::string name;
  Rational value;
  bool nonneg;
  std::string descriptor;
};

struct CertificateReport {
  Theorem theorem = Theorem::Distance;
  Regime regime = Regime::SmallStep;
  Rational mu, L, gamma;
  std::vector<NamedValue> multipliers;
  std::vector<NamedValue> sos_terms;
  std::vector<NamedValue> side_conditions;
  bool residual_zero = false;
  /// Nonzero coefficients of the residual, when it is not identically zero.
  std::vector<std::pair<std::string, std::string>> offending;
  std::string note;
  bool verified = false;
};

inline CertificateReport check(const Certificate<Rational>& c) {
  CertificateReport r;
  r.theorem = c.theorem;
  r.regime = c.regime;
  r.mu = c.mu;
  r.L = c.L;
  r.gamma = c.gamma;
  bool signs = true;
  for (const auto& w : c.inequalities) {
    r.multipliers.push_back({w.name, w.multiplier, w.multiplier >= 0, ""});
    signs = signs && w.multiplier >= 0;
  }
  for (const auto& t : c.sos) {
    r.sos_terms.push_back({t.name, t.coefficient, t.coefficient >= 0, t.combination.str()});
    signs = signs && t.coefficient >= 0;
  }
  for (const auto& s : c.side_conditions) {
    r.side_conditions.push_back({s.name, s.value, s.value >= 0, ""});
    signs = signs && s.value >= 0;
  }
  const auto residual = c.residual();
  r.residual_zero = residual.is_zero();
  if (!r.residual_zero) r.offending = residual.nonzero_terms();
  r.verified = r.residual_zero && signs;
  return r;
}

namespace detail {

inline void check_step(const Rational& L, const Rational& gamma) {
  if (!(gamma > 0) || gamma > 2 / L)
    throw std::invalid_argument("certificate: gamma must lie in (0, 2/L]");
}

}  // namespace detail

inline CertificateReport verify_distance(const Rational& mu, const Rational& L,
                                         const Rational& gamma, Regime regime) {
  detail::check_step(L, gamma);
  return check(distance_certificate<Rational>(mu, L, gamma, regime));
}

inline CertificateReport verify_residual(const Rational& mu, const Rational& L,
                                         const Rational& gamma, Regime regime) {
  detail::check_step(L, gamma);
  return check(residual_certificate<Rational>(mu, L, gamma, regime));
}

/// alpha(gamma) = 0 (wrong regime only) yields an unverified report, not an
/// exception.
inline CertificateReport verify_funcvalue(const Rational& mu, const Rational& L,
                                          const Rational& gamma, Regime regime) {
  detail::check_step(L, gamma);
  try {
    return check(funcvalue_certificate<Rational>(mu, L, gamma, regime));
  } catch (const DegenerateCertificate& e) {
    CertificateReport r;
    r.theorem = Theorem::FuncValue;
    r.regime = regime;
    r.mu = mu;
    r.L = L;
    r.gamma = gamma;
    const Rational alpha = regime == Regime::SmallStep ? alpha_small(mu, L, gamma)
                                                       : alpha_large(mu, L, gamma);
    r.side_conditions.push_back({"alpha", alpha, false, "zero denominator"});
    r.note = e.what();
    return r;
  }
}

inline CertificateReport verify(Theorem t, const Rational& mu, const Rational& L,
                                const Rational& gamma, Regime regime) {
  switch (t) {
    case Theorem::Distance: return verify_distance(mu, L, gamma, regime);
    case Theorem::Residual: return verify_residual(mu, L, gamma, regime);
    case Theorem::FuncValue: return verify_funcvalue(mu, L, gamma, regime);
  }
  throw std::logic_error("unreachable");
}

inline Certificate<Rational> build_certificate(Theorem t, const Rational& mu, const Rational& L,
                                               const Rational& gamma, Regime regime) {
  switch (t) {
    case Theorem::Distance: return distance_certificate<Rational>(mu, L, gamma, regime);
    case Theorem::Residual: return residual_certificate<Rational>(mu, L, gamma, regime);
    case Theorem::FuncValue: return funcvalue_certificate<Rational>(mu, L, gamma, regime);
  }
  throw std::logic_error("unreachable");
}

struct GridPoint {
  Rational mu, L, gamma;
  Regime regime;
};

/// Regimes valid at gamma: small below 2/(L+mu), large above, both at it.
inline std::vector<Regime> regimes_for(const Rational& mu, const Rational& L,
                                       const Rational& gamma) {
  const Rational boundary = 2 / (L + mu);
  if (gamma == boundary) return {Regime::SmallStep, Regime::LargeStep};
  return {gamma < boundary ? Regime::SmallStep : Regime::LargeStep};
}

/// mu in fractions*L, L in ls, gamma in {eps, 1/L, g*-eps, g*, g*+eps, 2/L-eps, 2/L}.
inline std::vector<GridPoint> certificate_grid(const std::vector<Rational>& mu_fractions,
                                               const std::vector<Rational>& ls,
                                               const Rational& eps = Rational(1, 1000)) {
  std::vector<GridPoint> grid;
  for (const auto& L : ls)
    for (const auto& frac : mu_fractions) {
      const Rational mu = frac * L;
      const Rational star = 2 / (L + mu);
      const std::vector<Rational> gammas{eps,        1 / L, star - eps, star,
                                         star + eps, 2 / L - eps, 2 / L};
      for (const auto& g : gammas)
        for (Regime r : regimes_for(mu, L, g)) grid.push_back({mu, L, g, r});
    }
  return grid;
}

inline std::vector<GridPoint> default_certificate_grid() {
  return certificate_grid({Rational(1, 100), Rational(1, 10), Rational(1, 4), Rational(1, 2),
                           Rational(3, 4), Rational(9, 10), Rational(99, 100)},
                          {Rational(1), Rational(3), Rational(10)});
}

/// One report per (theorem, grid point), ordered by theorem then grid index
/// regardless of completion order.
inline std::vector<CertificateReport> verify_grid(const std::vector<Theorem>& theorems,
                                                  const std::vector<GridPoint>& grid) {
  std::vector<std::future<CertificateReport>> pending;
  pending.reserve(theorems.size() * grid.size());
  for (Theorem t : theorems)
    for (const auto& p : grid)
      pending.push_back(std::async(std::launch::deferred | std::launch::async,
                                   [t, p] { return verify(t, p.mu, p.L, p.gamma, p.regime); }));
  std::vector<CertificateReport> out;
  out.reserve(pending.size());
  for (auto& f : pending) out.push_back(f.get());
  return out;
}

/// The identity checked for all gamma at once: gamma is an indeterminate and
/// coefficients live in Q(gamma). Sign conditions are decided on the regime's
/// gamma interval, (0, 2/(L+mu)] or [2/(L+mu), 2/L].
struct UnivariateReport {
  Theorem theorem = Theorem::Distance;
  Regime regime = Regime::SmallStep;
  Rational mu, L;
  Rational lo, hi;
  bool identity_zero = false;
  int max_numerator_degree = 0;
  int max_denominator_degree = 0;
  std::vector<std::pair<std::string, bool>> sign_checks;
  std::vector<std::pair<std::string, std::string>> offending;
  bool verified = false;
};

inline UnivariateReport verify_univariate(Theorem t, const Rational& mu, const Rational& L,
                                          Regime regime) {
  const RationalFunction g = RationalFunction::x();
  Certificate<RationalFunction> c = [&] {
    switch (t) {
      case Theorem::Distance: return distance_certificate(mu, L, g, regime);
      case Theorem::Residual: return residual_certificate(mu, L, g, regime);
      case Theorem::FuncValue: return funcvalue_certificate(mu, L, g, regime);
    }
    throw std::logic_error("unreachable");
  }();
  UnivariateReport r;
  r.theorem = t;
  r.regime = regime;
  r.mu = mu;
  r.L = L;
  const Rational star = 2 / (L + mu);
  const bool small = regime == Regime::SmallStep;
  r.lo = small ? Rational(0) : star;
  r.hi = small ? star : Rational(2 / L);

  // Degrees are taken term by term, before the cancellations of the sum.
  auto track = [&](const SymbolicExpr<RationalFunction>& e) {
    auto one = [&](const RationalFunction& f) {
      r.max_numerator_degree = std::max(r.max_numerator_degree, f.numerator().degree());
      r.max_denominator_degree = std::max(r.max_denominator_degree, f.denominator().degree());
    };
    for (const auto& f : e.scalar) one(f);
    for (const auto& f : e.gram) one(f);
  };
  for (const auto& w : c.inequalities) track(w.multiplier * w.inequality);
  for (const auto& t : c.sos) track(t.coefficient * sq_norm(substitute(t.combination, g)));
  const auto weighted = c.weighted_sum() + c.sos_sum();

  const auto residual = substitute(c.target, g) - weighted;
  r.identity_zero = residual.is_zero();
  if (!r.identity_zero) r.offending = residual.nonzero_terms();

  bool signs = true;
  auto sign_check = [&](const std::string& name, const RationalFunction& f) {
    const bool ok = nonneg_on(f, r.lo, r.hi, /*include_a=*/!small);
    r.sign_checks.emplace_back(name, ok);
    signs = signs && ok;
  };
  for (const auto& w : c.inequalities) sign_check(w.name, w.multiplier);
  for (const auto& s : c.sos) sign_check(s.name, s.coefficient);
  for (const auto& s : c.side_conditions) sign_check(s.name, s.value);
  r.verified = r.identity_zero && signs;
  return r;
}

}  // namespace pgm
