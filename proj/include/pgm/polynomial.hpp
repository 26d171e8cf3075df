#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pgm/rational.hpp"

namespace pgm {

/// Dense univariate polynomial over Q; coeffs_[i] multiplies x^i.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(const Rational& c) : coeffs_{c} { trim(); }  // NOLINT: implicit by design
  Polynomial(int c) : Polynomial(Rational(c)) {}            // NOLINT
  explicit Polynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  static Polynomial x() { return Polynomial(std::vector<Rational>{0, 1}); }

  bool is_zero() const { return coeffs_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Rational>& coefficients() const { return coeffs_; }
  Rational leading() const { return coeffs_.empty() ? Rational(0) : coeffs_.back(); }
  Rational coefficient(int i) const {
    return i >= 0 && i < static_cast<int>(coeffs_.size()) ? coeffs_[i] : Rational(0);
  }

  Rational operator()(const Rational& t) const {
    Rational acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
    return acc;
  }

  Polynomial derivative() const {
    std::vector<Rational> d;
    for (std::size_t i = 1; i < coeffs_.size(); ++i) d.push_back(coeffs_[i] * static_cast<int>(i));
    return Polynomial(std::move(d));
  }

  Polynomial monic() const {
    if (is_zero()) return *this;
    Polynomial m = *this;
    const Rational lc = leading();
    for (auto& c : m.coeffs_) c /= lc;
    return m;
  }

  Polynomial operator-() const {
    Polynomial r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }

  Polynomial& operator+=(const Polynomial& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
    for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    trim();
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) { return *this += -o; }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> r(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) r[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(r));
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

  /// Euclidean division a = q*b + r with deg r < deg b.
  friend std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    Polynomial r = a;
    std::vector<Rational> q(std::max(a.degree() - b.degree() + 1, 0));
    while (!r.is_zero() && r.degree() >= b.degree()) {
      const int shift = r.degree() - b.degree();
      const Rational factor = r.leading() / b.leading();
      q[shift] = factor;
      for (int i = 0; i <= b.degree(); ++i) r.coeffs_[i + shift] -= factor * b.coeffs_[i];
      r.trim();
    }
    return {Polynomial(std::move(q)), std::move(r)};
  }

  std::string str(const std::string& var = "g") const {
    if (is_zero()) return "0";
    std::string out;
    for (int i = degree(); i >= 0; --i) {
      if (coeffs_[i] == 0) continue;
      if (!out.empty()) out += " + ";
      out += "(" + coeffs_[i].str() + ")";
      if (i >= 1) out += "*" + var;
      if (i >= 2) out += "^" + std::to_string(i);
    }
    return out;
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }

  std::vector<Rational> coeffs_;
};

/// Monic gcd; gcd(0, 0) = 0.
inline Polynomial gcd(Polynomial a, Polynomial b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

inline bool is_zero(const Polynomial& p) { return p.is_zero(); }

/// p/q over Q in lowest terms with q monic.
class RationalFunction {
 public:
  RationalFunction() : num_(), den_(1) {}
  RationalFunction(const Rational& c) : num_(c), den_(1) {}  // NOLINT
  RationalFunction(int c) : num_(c), den_(1) {}              // NOLINT
  RationalFunction(Polynomial num, Polynomial den = Polynomial(1))
      : num_(std::move(num)), den_(std::move(den)) {
    normalize();
  }

  static RationalFunction x() { return RationalFunction(Polynomial::x()); }

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  /// Throws when the denominator vanishes at t.
  Rational operator()(const Rational& t) const {
    const Rational d = den_(t);
    if (d == 0) throw std::domain_error("rational function pole at evaluation point");
    return num_(t) / d;
  }

  RationalFunction operator-() const { return {-num_, den_, Normalized{}}; }
  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.den_ == b.den_) return RationalFunction(a.num_ + b.num_, a.den_);
    return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
    return a + (-b);
  }
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    if (b.is_zero()) throw std::domain_error("rational function division by zero");
    return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
  }
  RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
  RationalFunction& operator-=(const RationalFunction& o) { return *this = *this - o; }
  RationalFunction& operator*=(const RationalFunction& o) { return *this = *this * o; }
  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  std::string str(const std::string& var = "g") const {
    if (den_.degree() == 0) return num_.str(var);
    return "[" + num_.str(var) + "] / [" + den_.str(var) + "]";
  }

 private:
  struct Normalized {};
  RationalFunction(Polynomial num, Polynomial den, Normalized)
      : num_(std::move(num)), den_(std::move(den)) {}

  void normalize() {
    if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
    if (num_.is_zero()) {
      den_ = Polynomial(1);
      return;
    }
    const Polynomial g = gcd(num_, den_);
    if (g.degree() > 0) {
      num_ = divmod(num_, g).first;
      den_ = divmod(den_, g).first;
    }
    const Rational lc = den_.leading();
    if (lc != 1) {
      num_ = num_ * Polynomial(1 / lc);
      den_ = den_ * Polynomial(1 / lc);
    }
  }

  Polynomial num_;
  Polynomial den_;
};

inline bool is_zero(const RationalFunction& r) { return r.is_zero(); }

namespace detail {

inline int sign(const Rational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

inline std::vector<Polynomial> sturm_chain(const Polynomial& p) {
  std::vector<Polynomial> chain{p, p.derivative()};
  while (!chain.back().is_zero()) {
    auto r = divmod(chain[chain.size() - 2], chain.back()).second;
    chain.push_back(-r);
  }
  chain.pop_back();
  return chain;
}

inline int sign_changes(const std::vector<Polynomial>& chain, const Rational& t) {
  int changes = 0, last = 0;
  for (const auto& q : chain) {
    const int s = sign(q(t));
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

inline Polynomial squarefree(const Polynomial& p) {
  if (p.degree() <= 0) return p;
  return divmod(p, gcd(p, p.derivative())).first;
}

/// Removes a simple root at t (no-op when t is not a root).
inline Polynomial deflate(const Polynomial& s, const Rational& t) {
  if (s.is_zero() || s(t) != 0) return s;
  return divmod(s, Polynomial(std::vector<Rational>{-t, 1})).first;
}

}  // namespace detail

/// Number of distinct real roots of p in the open interval (a, b).
inline int count_roots_open(const Polynomial& p, const Rational& a, const Rational& b) {
  if (p.is_zero()) throw std::domain_error("count_roots_open: zero polynomial");
  if (!(a < b)) return 0;
  const Polynomial s = detail::deflate(detail::deflate(detail::squarefree(p), a), b);
  if (s.degree() <= 0) return 0;
  const auto chain = detail::sturm_chain(s);
  return detail::sign_changes(chain, a) - detail::sign_changes(chain, b);
}

/// Whether p >= 0 on [a, b], decided exactly. Sample points are chosen in every
/// root-free component of (a, b) through Sturm-sequence root isolation.
inline bool nonneg_on(const Polynomial& p, const Rational& a, const Rational& b) {
  if (p.is_zero()) return true;
  if (b < a) throw std::invalid_argument("nonneg_on: empty interval");
  if (a == b) return p(a) >= 0;
  const Polynomial s = detail::deflate(detail::deflate(detail::squarefree(p), a), b);
  if (s.degree() <= 0) return p((a + b) / 2) >= 0;
  const auto chain = detail::sturm_chain(s);
  auto count = [&](const Rational& lo, const Rational& hi) {
    return detail::sign_changes(chain, lo) - detail::sign_changes(chain, hi);
  };

  // Isolate each root of s in (lo, hi] with s(lo), s(hi) != 0 and
  // a < lo, hi < b, so lo and hi lie in root-free components.
  std::vector<Rational> samples;
  std::vector<std::pair<Rational, Rational>> pending{{a, b}};
  while (!pending.empty()) {
    auto [lo, hi] = pending.back();
    pending.pop_back();
    const int n = count(lo, hi);
    if (n == 0) {
      samples.push_back((lo + hi) / 2);
      continue;
    }
    if (n == 1 && lo != a && hi != b) {
      samples.push_back(lo);
      samples.push_back(hi);
      continue;
    }
    // Split at a point that is not a root of s; s has finitely many.
    Rational mid = (lo + hi) / 2;
    for (int j = 2; s(mid) == 0; ++j) mid = lo + (hi - lo) * Rational(j, 2 * j + 1);
    pending.emplace_back(lo, mid);
    pending.emplace_back(mid, hi);
  }
  for (const auto& t : samples)
    if (p(t) < 0) return false;
  return true;
}

/// Whether r = p/q is defined and >= 0 on (a, b], or on [a, b] when
/// include_a is set.
inline bool nonneg_on(const RationalFunction& r, const Rational& a, const Rational& b,
                      bool include_a = true) {
  if (r.is_zero()) return true;
  const Polynomial& q = r.denominator();
  if (q(b) == 0 || (include_a && q(a) == 0)) return false;
  if (q.degree() > 0 && count_roots_open(q, a, b) > 0) return false;
  return nonneg_on(r.numerator() * q, a, b);
}

}  // namespace pgm
