#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pgm/core_rates.hpp"
#include "pgm/prox_catalog.hpp"
#include "pgm/types.hpp"

namespace pgm {

namespace smooth_kind {
/// (a/2)|x|^2
struct ScaledSqNorm {
  double a;
  Eigen::Index dim;
};
/// 0.5 * sum d_i x_i^2 + <b, x>
struct DiagonalQuadratic {
  Vector d;
  Vector b;
};
/// 0.5 * x^T A x + <b, x>, A symmetric
struct DenseQuadratic {
  Matrix A;
  Vector b;
};
}  // namespace smooth_kind

struct ValueGrad {
  double value;
  Vector grad;
};

/// Quadratic member of F_{mu,L}. The declared class is validated against the
/// spectrum unless built through `unchecked`.
class SmoothFunction {
 public:
  using Kind = std::variant<smooth_kind::ScaledSqNorm, smooth_kind::DiagonalQuadratic,
                            smooth_kind::DenseQuadratic>;

  SmoothFunction(Kind kind, ClassParams params) : SmoothFunction(std::move(kind), params, true) {}

  static SmoothFunction unchecked(Kind kind, ClassParams params) {
    return SmoothFunction(std::move(kind), params, false);
  }

  static SmoothFunction scaled_sq_norm(double a, Eigen::Index dim, ClassParams params) {
    return {smooth_kind::ScaledSqNorm{a, dim}, params};
  }
  static SmoothFunction diagonal(Vector d, Vector b, ClassParams params) {
    return {smooth_kind::DiagonalQuadratic{std::move(d), std::move(b)}, params};
  }
  static SmoothFunction dense(Matrix A, Vector b, ClassParams params) {
    return {smooth_kind::DenseQuadratic{std::move(A), std::move(b)}, params};
  }

  const Kind& kind() const { return kind_; }
  const ClassParams& params() const { return params_; }

  Eigen::Index dimension() const {
    return std::visit(
        [](const auto& k) -> Eigen::Index {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, smooth_kind::ScaledSqNorm>) return k.dim;
          else if constexpr (std::is_same_v<K, smooth_kind::DiagonalQuadratic>) return k.d.size();
          else return k.b.size();
        },
        kind_);
  }

  /// Eigenvalues of the Hessian, ascending.
  Vector spectrum() const {
    return std::visit(
        [](const auto& k) -> Vector {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, smooth_kind::ScaledSqNorm>) {
            return Vector::Constant(k.dim, k.a);
          } else if constexpr (std::is_same_v<K, smooth_kind::DiagonalQuadratic>) {
            Vector s = k.d;
            std::sort(s.begin(), s.end());
            return s;
          } else {
            Eigen::SelfAdjointEigenSolver<Matrix> es(k.A, Eigen::EigenvaluesOnly);
            return es.eigenvalues();
          }
        },
        kind_);
  }

  /// The tightest (mu, L) the spectrum actually attains.
  ClassParams effective_params() const {
    const Vector s = spectrum();
    return ClassParams(std::max(s.minCoeff(), 0.0), std::max(s.maxCoeff(), 1e-300));
  }

  bool is_diagonal() const { return !std::holds_alternative<smooth_kind::DenseQuadratic>(kind_); }

  /// Diagonal of the Hessian and the linear term, for separable members.
  std::pair<Vector, Vector> diagonal_form() const {
    return std::visit(
        [](const auto& k) -> std::pair<Vector, Vector> {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, smooth_kind::ScaledSqNorm>) {
            return {Vector::Constant(k.dim, k.a), Vector::Zero(k.dim)};
          } else if constexpr (std::is_same_v<K, smooth_kind::DiagonalQuadratic>) {
            return {k.d, k.b};
          } else {
            throw std::logic_error("diagonal_form: dense quadratic is not separable");
          }
        },
        kind_);
  }

  /// Hessian-vector product.
  Vector hessian_times(const Vector& v) const {
    return std::visit(
        [&](const auto& k) -> Vector {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, smooth_kind::ScaledSqNorm>) return k.a * v;
          else if constexpr (std::is_same_v<K, smooth_kind::DiagonalQuadratic>)
            return k.d.cwiseProduct(v);
          else return k.A * v;
        },
        kind_);
  }

 private:
  SmoothFunction(Kind kind, ClassParams params, bool validate)
      : kind_(std::move(kind)), params_(params) {
    if (const auto* dq = std::get_if<smooth_kind::DiagonalQuadratic>(&kind_)) {
      if (dq->d.size() != dq->b.size() || dq->d.size() < 1)
        throw std::invalid_argument("DiagonalQuadratic: d and b must have equal positive size");
    }
    if (const auto* de = std::get_if<smooth_kind::DenseQuadratic>(&kind_)) {
      if (de->A.rows() != de->A.cols() || de->A.rows() != de->b.size() || de->b.size() < 1)
        throw std::invalid_argument("DenseQuadratic: A must be square and match b");
      if (!de->A.isApprox(de->A.transpose(), 1e-14))
        throw std::invalid_argument("DenseQuadratic: A must be symmetric");
    }
    if (const auto* sq = std::get_if<smooth_kind::ScaledSqNorm>(&kind_)) {
      if (sq->dim < 1) throw std::invalid_argument("ScaledSqNorm: dimension must be positive");
    }
    if (validate) {
      const Vector s = spectrum();
      // Dense spectra come from an eigensolver; allow roundoff there only.
      const double slack = is_diagonal() ? 0.0 : 1e-12 * params_.L;
      if (s.minCoeff() < params_.mu - slack || s.maxCoeff() > params_.L + slack)
        throw std::invalid_argument("SmoothFunction: spectrum outside [mu, L] of declared class");
    }
  }

  Kind kind_;
  ClassParams params_;
};

inline ValueGrad eval_grad(const SmoothFunction& f, const Vector& x) {
  if (x.size() != f.dimension()) throw std::invalid_argument("eval_grad: dimension mismatch");
  return std::visit(
      [&](const auto& k) -> ValueGrad {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, smooth_kind::ScaledSqNorm>) {
          return {0.5 * k.a * x.squaredNorm(), k.a * x};
        } else if constexpr (std::is_same_v<K, smooth_kind::DiagonalQuadratic>) {
          Vector dx = k.d.cwiseProduct(x);
          return {0.5 * x.dot(dx) + k.b.dot(x), dx + k.b};
        } else {
          Vector Ax = k.A * x;
          return {0.5 * x.dot(Ax) + k.b.dot(x), Ax + k.b};
        }
      },
      f.kind());
}

/// Random diagonal quadratic whose spectrum contains both mu and L, plus a
/// standard-normal linear term. With dim = 1 and mu < L the single curvature
/// is mu; effective_params() then reports L_eff = mu.
inline SmoothFunction random_instance(const ClassParams& params, Eigen::Index dim,
                                      std::uint64_t seed, bool with_linear_term = true) {
  if (dim < 1) throw std::invalid_argument("random_instance: dim must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> spread(params.mu, params.L);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector d(dim), b = Vector::Zero(dim);
  for (Eigen::Index i = 0; i < dim; ++i) d[i] = spread(rng);
  d[0] = params.mu;
  if (dim >= 2) d[1] = params.L;
  std::shuffle(d.begin(), d.end(), rng);
  if (with_linear_term)
    for (Eigen::Index i = 0; i < dim; ++i) b[i] = normal(rng);
  return SmoothFunction::diagonal(std::move(d), std::move(b), params);
}

/// Left-hand side minus right-hand side of the F_{mu,L} interpolation
/// inequality for the pair (i, j); nonnegative for members of the class.
inline double interpolation_slack(const ClassParams& p, const Vector& xi, double fi,
                                  const Vector& gi, const Vector& xj, double fj,
                                  const Vector& gj) {
  const Vector dx = xi - xj;
  const Vector dg = gi - gj;
  const double coupling = p.mu / (2.0 * (1.0 - p.mu / p.L));
  return fi - fj - gj.dot(dx) - dg.squaredNorm() / (2.0 * p.L) -
         coupling * (dx - dg / p.L).squaredNorm();
}

/// Sum of the (i, j) and (j, i) interpolation inequalities, which no longer
/// involves function values. Covers both the optimum-relaxed and the
/// consecutive-iterate relaxed assumptions.
inline double relaxed_pair_slack(const ClassParams& p, const Vector& xi, const Vector& gi,
                                 const Vector& xj, const Vector& gj) {
  if (!(p.mu < p.L)) throw std::domain_error("relaxed_pair_slack requires mu < L");
  const Vector dx = xi - xj;
  const Vector dg = gi - gj;
  return dg.dot(dx) - dg.squaredNorm() / p.L -
         p.mu / (1.0 - p.mu / p.L) * (dx - dg / p.L).squaredNorm();
}

/// Most negative interpolation slack over all ordered pairs of `points`.
inline double check_interpolation(const SmoothFunction& f, const ClassParams& p,
                                  const std::vector<Vector>& points) {
  if (!(p.mu < p.L))
    throw std::domain_error("check_interpolation: mu = L is handled separately");
  if (points.size() < 2) throw std::invalid_argument("check_interpolation: need >= 2 points");
  std::vector<ValueGrad> vg;
  vg.reserve(points.size());
  for (const auto& x : points) vg.push_back(eval_grad(f, x));
  double worst = kInf;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i == j) continue;
      worst = std::min(worst, interpolation_slack(p, points[i], vg[i].value, vg[i].grad,
                                                  points[j], vg[j].value, vg[j].grad));
    }
  return worst;
}

struct Optimum {
  Vector x;
  double F;
};

namespace detail {

// argmin_t 0.5*d*t^2 + b*t + h_i(t) for one coordinate of a separable h.
inline double separable_argmin(const ProxFunction& h, Eigen::Index i, double d, double b) {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        auto unbounded = [] {
          return std::domain_error("solve_optimum: composite objective is unbounded below");
        };
        if constexpr (std::is_same_v<K, prox_kind::Zero>) {
          if (d > 0.0) return -b / d;
          if (b == 0.0) return 0.0;
          throw unbounded();
        } else if constexpr (std::is_same_v<K, prox_kind::IndicatorNonneg>) {
          if (d > 0.0) return std::max(-b / d, 0.0);
          if (b >= 0.0) return 0.0;
          throw unbounded();
        } else if constexpr (std::is_same_v<K, prox_kind::IndicatorBox>) {
          const double lo = k.lo[i], hi = k.hi[i];
          if (d > 0.0) return std::clamp(-b / d, lo, hi);
          if (b > 0.0) {
            if (std::isinf(lo)) throw unbounded();
            return lo;
          }
          if (b < 0.0) {
            if (std::isinf(hi)) throw unbounded();
            return hi;
          }
          return std::clamp(0.0, lo, hi);
        } else if constexpr (std::is_same_v<K, prox_kind::L1>) {
          const double w = k.weight;
          const double shrunk = std::copysign(std::max(std::abs(b) - w, 0.0), -b);
          if (d > 0.0) return shrunk / d;
          if (std::abs(b) <= w) return 0.0;
          throw unbounded();
        } else {
          const double bc = b + k.c[i];
          if (d > 0.0) return std::max(-bc / d, 0.0);
          if (bc >= 0.0) return 0.0;
          throw unbounded();
        }
      },
      h.kind());
}

}  // namespace detail

inline double composite_value(const SmoothFunction& f, const ProxFunction& h, const Vector& x) {
  const double hv = value(h, x);
  if (std::isinf(hv)) return kInf;
  return eval_grad(f, x).value + hv;
}

/// Minimizer of f + h. Separable members are solved coordinatewise in closed
/// form; a dense f with nonzero h falls back to running the method at the
/// optimal step until it reaches a fixed point.
inline Optimum solve_optimum(const SmoothFunction& f, const ProxFunction& h) {
  if (f.dimension() != h.dimension())
    throw std::invalid_argument("solve_optimum: dimension mismatch");
  Vector x(f.dimension());
  if (f.is_diagonal()) {
    const auto [d, b] = f.diagonal_form();
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = detail::separable_argmin(h, i, d[i], b[i]);
  } else if (h.is_zero()) {
    const auto& de = std::get<smooth_kind::DenseQuadratic>(f.kind());
    x = de.A.ldlt().solve(-de.b);
  } else {
    const ClassParams p = f.effective_params();
    if (!p.strongly_convex())
      throw std::domain_error("solve_optimum: dense composite case needs mu > 0");
    const double gamma = 2.0 / (p.L + p.mu);
    x = Vector::Zero(f.dimension());
    for (int it = 0; it < 1000000; ++it) {
      Vector next = prox(h, gamma, x - gamma * eval_grad(f, x).grad);
      const double step = (next - x).norm();
      x = std::move(next);
      if (step <= 1e-15 * (1.0 + x.norm())) break;
    }
  }
  return {x, composite_value(f, h, x)};
}

/// F = f + h, with the class constants of f and an optional known optimum.
struct CompositeProblem {
  SmoothFunction f;
  ProxFunction h;
  std::optional<Optimum> optimum;

  CompositeProblem(SmoothFunction f_, ProxFunction h_, std::optional<Optimum> opt = std::nullopt)
      : f(std::move(f_)), h(std::move(h_)), optimum(std::move(opt)) {
    if (f.dimension() != h.dimension())
      throw std::invalid_argument("CompositeProblem: f and h dimensions differ");
  }

  const ClassParams& params() const { return f.params(); }
  Eigen::Index dimension() const { return f.dimension(); }
  double F(const Vector& x) const { return composite_value(f, h, x); }

  /// Fills `optimum` from the catalog closed forms when absent.
  const Optimum& ensure_optimum() {
    if (!optimum) optimum = solve_optimum(f, h);
    return *optimum;
  }
};

}  // namespace pgm
