#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "pgm/types.hpp"

namespace pgm {

namespace prox_kind {
struct Zero {};
struct IndicatorNonneg {};
struct IndicatorBox {
  Vector lo;
  Vector hi;
};
struct L1 {
  double weight = 1.0;
};
/// <c, x> + indicator of the nonnegative orthant.
struct LinearPlusIndicatorNonneg {
  Vector c;
};
}  // namespace prox_kind

/// Closed, proper, convex h with a closed-form proximal operator.
class ProxFunction {
 public:
  using Kind = std::variant<prox_kind::Zero, prox_kind::IndicatorNonneg, prox_kind::IndicatorBox,
                            prox_kind::L1, prox_kind::LinearPlusIndicatorNonneg>;

  ProxFunction(Kind kind, Eigen::Index dim) : kind_(std::move(kind)), dim_(dim) {
    if (dim_ < 1) throw std::invalid_argument("ProxFunction: dimension must be positive");
    if (const auto* box = std::get_if<prox_kind::IndicatorBox>(&kind_)) {
      if (box->lo.size() != dim_ || box->hi.size() != dim_)
        throw std::invalid_argument("IndicatorBox: bound dimension mismatch");
      if ((box->lo.array() > box->hi.array()).any())
        throw std::invalid_argument("IndicatorBox: lo must be <= hi coordinatewise");
    }
    if (const auto* l1 = std::get_if<prox_kind::L1>(&kind_)) {
      if (!(l1->weight >= 0.0)) throw std::invalid_argument("L1: weight must be nonnegative");
    }
    if (const auto* lin = std::get_if<prox_kind::LinearPlusIndicatorNonneg>(&kind_)) {
      if (lin->c.size() != dim_)
        throw std::invalid_argument("LinearPlusIndicatorNonneg: c dimension mismatch");
    }
  }

  static ProxFunction zero(Eigen::Index dim) { return {prox_kind::Zero{}, dim}; }
  static ProxFunction nonneg(Eigen::Index dim) { return {prox_kind::IndicatorNonneg{}, dim}; }
  static ProxFunction box(Vector lo, Vector hi) {
    const auto d = lo.size();
    return {prox_kind::IndicatorBox{std::move(lo), std::move(hi)}, d};
  }
  static ProxFunction l1(double weight, Eigen::Index dim) { return {prox_kind::L1{weight}, dim}; }
  static ProxFunction linear_nonneg(Vector c) {
    const auto d = c.size();
    return {prox_kind::LinearPlusIndicatorNonneg{std::move(c)}, d};
  }

  const Kind& kind() const { return kind_; }
  Eigen::Index dimension() const { return dim_; }
  bool is_zero() const { return std::holds_alternative<prox_kind::Zero>(kind_); }

  std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, prox_kind::Zero>) return "zero";
          else if constexpr (std::is_same_v<K, prox_kind::IndicatorNonneg>) return "nonneg";
          else if constexpr (std::is_same_v<K, prox_kind::IndicatorBox>) return "box";
          else if constexpr (std::is_same_v<K, prox_kind::L1>) return "l1";
          else return "linear_nonneg";
        },
        kind_);
  }

  /// Closed interval [lo, hi] forming the i-th factor of the subdifferential
  /// at x (every catalog member is separable).
  std::pair<double, double> subdifferential_interval(const Vector& x, Eigen::Index i) const {
    const double xi = x[i];
    return std::visit(
        [&](const auto& k) -> std::pair<double, double> {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, prox_kind::Zero>) {
            return {0.0, 0.0};
          } else if constexpr (std::is_same_v<K, prox_kind::IndicatorNonneg>) {
            if (xi > 0.0) return {0.0, 0.0};
            return {-kInf, 0.0};
          } else if constexpr (std::is_same_v<K, prox_kind::IndicatorBox>) {
            const double lo = k.lo[i], hi = k.hi[i];
            const double a = (xi <= lo) ? -kInf : 0.0;
            const double b = (xi >= hi) ? kInf : 0.0;
            return {a, b};
          } else if constexpr (std::is_same_v<K, prox_kind::L1>) {
            if (xi > 0.0) return {k.weight, k.weight};
            if (xi < 0.0) return {-k.weight, -k.weight};
            return {-k.weight, k.weight};
          } else {
            if (xi > 0.0) return {k.c[i], k.c[i]};
            return {-kInf, k.c[i]};
          }
        },
        kind_);
  }

 private:
  Kind kind_;
  Eigen::Index dim_;
};

namespace detail {
inline void check_dim(const ProxFunction& h, const Vector& x, const char* what) {
  if (x.size() != h.dimension())
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}
}  // namespace detail

/// Extended-real value; +inf outside the domain of indicators.
inline double value(const ProxFunction& h, const Vector& x) {
  detail::check_dim(h, x, "value");
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, prox_kind::Zero>) {
          return 0.0;
        } else if constexpr (std::is_same_v<K, prox_kind::IndicatorNonneg>) {
          return (x.array() >= 0.0).all() ? 0.0 : kInf;
        } else if constexpr (std::is_same_v<K, prox_kind::IndicatorBox>) {
          return ((x.array() >= k.lo.array()) && (x.array() <= k.hi.array())).all() ? 0.0 : kInf;
        } else if constexpr (std::is_same_v<K, prox_kind::L1>) {
          return k.weight * x.lpNorm<1>();
        } else {
          return (x.array() >= 0.0).all() ? k.c.dot(x) : kInf;
        }
      },
      h.kind());
}

/// argmin_y gamma*h(y) + 0.5*|x - y|^2
inline Vector prox(const ProxFunction& h, double gamma, const Vector& x) {
  if (!(gamma > 0.0)) throw std::invalid_argument("prox: gamma must be positive");
  detail::check_dim(h, x, "prox");
  return std::visit(
      [&](const auto& k) -> Vector {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, prox_kind::Zero>) {
          return x;
        } else if constexpr (std::is_same_v<K, prox_kind::IndicatorNonneg>) {
          return x.cwiseMax(0.0);
        } else if constexpr (std::is_same_v<K, prox_kind::IndicatorBox>) {
          return x.cwiseMax(k.lo).cwiseMin(k.hi);
        } else if constexpr (std::is_same_v<K, prox_kind::L1>) {
          const double t = gamma * k.weight;
          return x.unaryExpr([t](double v) {
            return std::copysign(std::max(std::abs(v) - t, 0.0), v);
          });
        } else {
          return (x - gamma * k.c).cwiseMax(0.0);
        }
      },
      h.kind());
}

/// Decides s in dh(x) from the closed-form subdifferential.
inline bool subgradient_membership(const ProxFunction& h, const Vector& x, const Vector& s,
                                   double tol) {
  detail::check_dim(h, x, "subgradient_membership");
  detail::check_dim(h, s, "subgradient_membership");
  if (std::isinf(value(h, x)))
    throw std::domain_error("subgradient_membership: x is outside dom h");
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto [lo, hi] = h.subdifferential_interval(x, i);
    if (s[i] < lo - tol || s[i] > hi + tol) return false;
  }
  return true;
}

/// The element of dh(x) closest to `target` (coordinatewise clamp).
/// target = -grad f(x) yields the subgradient minimizing |grad f(x) + s|.
inline Vector closest_subgradient(const ProxFunction& h, const Vector& x, const Vector& target) {
  detail::check_dim(h, x, "closest_subgradient");
  if (std::isinf(value(h, x)))
    throw std::domain_error("closest_subgradient: x is outside dom h");
  Vector s(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto [lo, hi] = h.subdifferential_interval(x, i);
    s[i] = std::clamp(target[i], lo, hi);
  }
  return s;
}

}  // namespace pgm
