#pragma once

#include <stdexcept>
#include <string_view>

#include "pgm/symbolic.hpp"

namespace pgm {

/// The three points of a one-step proof: x_k, x_{k+1} and x_*.
enum class PointLabel { K, K1, Star };

inline std::string_view to_string(PointLabel p) {
  switch (p) {
    case PointLabel::K: return "k";
    case PointLabel::K1: return "k+1";
    case PointLabel::Star: return "*";
  }
  return "?";
}

namespace detail {

template <class Field>
LinearCombination<Field> point(PointLabel p) {
  using LC = LinearCombination<Field>;
  switch (p) {
    case PointLabel::K: return LC::of(VectorSymbol::X);
    case PointLabel::K1: return LC::of(VectorSymbol::Xk1);
    case PointLabel::Star: return LC::zero();
  }
  throw std::logic_error("unreachable");
}

template <class Field>
LinearCombination<Field> gradient(PointLabel p) {
  using LC = LinearCombination<Field>;
  switch (p) {
    case PointLabel::K: return LC::of(VectorSymbol::Gk);
    case PointLabel::K1: return LC::of(VectorSymbol::Gk1);
    case PointLabel::Star: return LC::of(VectorSymbol::Gs);
  }
  throw std::logic_error("unreachable");
}

template <class Field>
LinearCombination<Field> subgradient(PointLabel p) {
  using LC = LinearCombination<Field>;
  switch (p) {
    case PointLabel::K: return LC::of(VectorSymbol::Sk);
    case PointLabel::K1: return LC::of(VectorSymbol::Sk1);
    case PointLabel::Star: return LC::of(VectorSymbol::Ss);
  }
  throw std::logic_error("unreachable");
}

inline ScalarSymbol f_symbol(PointLabel p) {
  switch (p) {
    case PointLabel::K: return ScalarSymbol::Fk;
    case PointLabel::K1: return ScalarSymbol::Fk1;
    case PointLabel::Star: return ScalarSymbol::Fs;
  }
  throw std::logic_error("unreachable");
}

inline ScalarSymbol h_symbol(PointLabel p) {
  switch (p) {
    case PointLabel::K: return ScalarSymbol::Hk;
    case PointLabel::K1: return ScalarSymbol::Hk1;
    case PointLabel::Star: return ScalarSymbol::Hs;
  }
  throw std::logic_error("unreachable");
}

}  // namespace detail

/// f_i - f_j - <g_j, x_i - x_j> - |g_i - g_j|^2/(2L)
///   - mu/(2(1 - mu/L)) |x_i - x_j - (g_i - g_j)/L|^2, in canonical form.
/// Nonnegative whenever f is in F_{mu,L}.
template <class Field>
SymbolicExpr<Field> interp_smooth(PointLabel i, PointLabel j, const Rational& mu,
                                  const Rational& L, const Field& gamma) {
  if (!(mu < L)) throw std::invalid_argument("interp_smooth requires mu < L");
  if (i == j) return {};
  using E = SymbolicExpr<Field>;
  const auto dx = detail::point<Field>(i) - detail::point<Field>(j);
  const auto dg = detail::gradient<Field>(i) - detail::gradient<Field>(j);
  const Field inv_L = Field(Rational(1 / L));
  const Field coupling = Field(Rational(mu * L / (2 * (L - mu))));
  E e = E::symbol(detail::f_symbol(i)) - E::symbol(detail::f_symbol(j));
  e -= inner(detail::gradient<Field>(j), dx);
  e -= Field(Rational(1 / (2 * L))) * sq_norm(dg);
  e -= coupling * sq_norm(dx - inv_L * dg);
  return substitute(e, gamma);
}

/// h_i - h_j - <s_j, x_i - x_j>, nonnegative for convex h.
template <class Field>
SymbolicExpr<Field> interp_convex(PointLabel i, PointLabel j, const Field& gamma) {
  if (i == j) return {};
  using E = SymbolicExpr<Field>;
  E e = E::symbol(detail::h_symbol(i)) - E::symbol(detail::h_symbol(j));
  e -= inner(detail::subgradient<Field>(j), detail::point<Field>(i) - detail::point<Field>(j));
  return substitute(e, gamma);
}

}  // namespace pgm
