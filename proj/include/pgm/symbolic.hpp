#pragma once

#include <array>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgm/polynomial.hpp"
#include "pgm/rational.hpp"
#include "pgm/types.hpp"

namespace pgm {

/// Vector unknowns of a one-step proof, with the gauge x_* = 0 so that
/// X = x_k - x_*. Xk1 (= x_{k+1}) and Ss (= s_*) are raw symbols that the
/// canonical form eliminates.
enum class VectorSymbol { X, Gk, Gk1, Gs, Sk, Sk1, Xk1, Ss };

inline constexpr int kVectorSymbols = 8;
inline constexpr int kCanonicalSymbols = 6;

inline std::string_view to_string(VectorSymbol v) {
  static constexpr std::string_view names[] = {"X", "Gk", "Gk1", "Gs", "Sk", "Sk1", "Xk1", "Ss"};
  return names[static_cast<int>(v)];
}

/// Affine-in-the-unknowns scalar symbols.
enum class ScalarSymbol { One, Fk, Fk1, Fs, Hk, Hk1, Hs };

inline constexpr int kScalarSymbols = 7;

inline std::string_view to_string(ScalarSymbol s) {
  static constexpr std::string_view names[] = {"1", "f_k", "f_k1", "f_s", "h_k", "h_k1", "h_s"};
  return names[static_cast<int>(s)];
}

/// Field-valued linear combination of vector symbols.
template <class Field>
struct LinearCombination {
  std::array<Field, kVectorSymbols> coeff{};

  LinearCombination() { coeff.fill(Field(0)); }

  static LinearCombination of(VectorSymbol v) {
    LinearCombination lc;
    lc.coeff[static_cast<int>(v)] = Field(1);
    return lc;
  }
  static LinearCombination zero() { return {}; }

  const Field& operator[](VectorSymbol v) const { return coeff[static_cast<int>(v)]; }

  LinearCombination& operator+=(const LinearCombination& o) {
    for (int i = 0; i < kVectorSymbols; ++i) coeff[i] = coeff[i] + o.coeff[i];
    return *this;
  }
  LinearCombination& operator-=(const LinearCombination& o) {
    for (int i = 0; i < kVectorSymbols; ++i) coeff[i] = coeff[i] - o.coeff[i];
    return *this;
  }
  friend LinearCombination operator+(LinearCombination a, const LinearCombination& b) {
    return a += b;
  }
  friend LinearCombination operator-(LinearCombination a, const LinearCombination& b) {
    return a -= b;
  }
  friend LinearCombination operator-(const LinearCombination& a) {
    return LinearCombination{} - a;
  }
  friend LinearCombination operator*(const Field& s, LinearCombination a) {
    for (auto& c : a.coeff) c = s * c;
    return a;
  }

  std::string str() const {
    std::string out;
    for (int i = 0; i < kVectorSymbols; ++i) {
      if (is_zero(coeff[i])) continue;
      if (!out.empty()) out += " + ";
      out += "(" + coeff[i].str() + ")*" + std::string(to_string(static_cast<VectorSymbol>(i)));
    }
    return out.empty() ? "0" : out;
  }
};

namespace detail {
// Index of the unordered pair {i, j} in the packed upper triangle.
constexpr int gram_index(int i, int j) {
  if (i > j) std::swap(i, j);
  return i * kVectorSymbols - i * (i - 1) / 2 + (j - i);
}
}  // namespace detail

inline constexpr int kGramEntries = kVectorSymbols * (kVectorSymbols + 1) / 2;

/// Sum of field coefficients on scalar symbols and on Gram entries <v_i, v_j>.
/// Gram keys are unordered pairs, so symmetry holds by construction.
template <class Field>
struct SymbolicExpr {
  std::array<Field, kScalarSymbols> scalar{};
  std::array<Field, kGramEntries> gram{};

  SymbolicExpr() {
    scalar.fill(Field(0));
    gram.fill(Field(0));
  }

  static SymbolicExpr symbol(ScalarSymbol s, const Field& c = Field(1)) {
    SymbolicExpr e;
    e.scalar[static_cast<int>(s)] = c;
    return e;
  }
  static SymbolicExpr constant(const Field& c) { return symbol(ScalarSymbol::One, c); }

  Field& at(VectorSymbol a, VectorSymbol b) {
    return gram[detail::gram_index(static_cast<int>(a), static_cast<int>(b))];
  }
  const Field& at(VectorSymbol a, VectorSymbol b) const {
    return gram[detail::gram_index(static_cast<int>(a), static_cast<int>(b))];
  }
  Field& at(ScalarSymbol s) { return scalar[static_cast<int>(s)]; }
  const Field& at(ScalarSymbol s) const { return scalar[static_cast<int>(s)]; }

  bool is_zero() const {
    for (const auto& c : scalar)
      if (!pgm::is_zero(c)) return false;
    for (const auto& c : gram)
      if (!pgm::is_zero(c)) return false;
    return true;
  }

  SymbolicExpr& operator+=(const SymbolicExpr& o) {
    for (int i = 0; i < kScalarSymbols; ++i) scalar[i] = scalar[i] + o.scalar[i];
    for (int i = 0; i < kGramEntries; ++i) gram[i] = gram[i] + o.gram[i];
    return *this;
  }
  SymbolicExpr& operator-=(const SymbolicExpr& o) {
    for (int i = 0; i < kScalarSymbols; ++i) scalar[i] = scalar[i] - o.scalar[i];
    for (int i = 0; i < kGramEntries; ++i) gram[i] = gram[i] - o.gram[i];
    return *this;
  }
  friend SymbolicExpr operator+(SymbolicExpr a, const SymbolicExpr& b) { return a += b; }
  friend SymbolicExpr operator-(SymbolicExpr a, const SymbolicExpr& b) { return a -= b; }
  friend SymbolicExpr operator-(const SymbolicExpr& a) { return SymbolicExpr{} - a; }
  friend SymbolicExpr operator*(const Field& s, SymbolicExpr a) {
    for (auto& c : a.scalar) c = s * c;
    for (auto& c : a.gram) c = s * c;
    return a;
  }
  friend bool operator==(const SymbolicExpr& a, const SymbolicExpr& b) {
    return a.scalar == b.scalar && a.gram == b.gram;
  }

  /// Nonzero coefficients as (entry name, value) pairs.
  std::vector<std::pair<std::string, std::string>> nonzero_terms() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (int i = 0; i < kScalarSymbols; ++i)
      if (!pgm::is_zero(scalar[i]))
        out.emplace_back(std::string(to_string(static_cast<ScalarSymbol>(i))), scalar[i].str());
    for (int i = 0; i < kVectorSymbols; ++i)
      for (int j = i; j < kVectorSymbols; ++j) {
        const Field& c = gram[detail::gram_index(i, j)];
        if (pgm::is_zero(c)) continue;
        out.emplace_back("<" + std::string(to_string(static_cast<VectorSymbol>(i))) + "," +
                             std::string(to_string(static_cast<VectorSymbol>(j))) + ">",
                         c.str());
      }
    return out;
  }
};

/// <a, b> expanded into Gram entries.
template <class Field>
SymbolicExpr<Field> inner(const LinearCombination<Field>& a, const LinearCombination<Field>& b) {
  SymbolicExpr<Field> e;
  for (int i = 0; i < kVectorSymbols; ++i) {
    if (is_zero(a.coeff[i])) continue;
    for (int j = 0; j < kVectorSymbols; ++j) {
      if (is_zero(b.coeff[j])) continue;
      Field& slot = e.gram[detail::gram_index(i, j)];
      slot = slot + a.coeff[i] * b.coeff[j];
    }
  }
  return e;
}

template <class Field>
SymbolicExpr<Field> sq_norm(const LinearCombination<Field>& a) {
  return inner(a, a);
}

/// Images of the raw symbols: x_{k+1} = x_k - gamma (g_k + s_{k+1}), s_* = -g_*.
template <class Field>
LinearCombination<Field> substitution_image(VectorSymbol v, const Field& gamma) {
  using LC = LinearCombination<Field>;
  switch (v) {
    case VectorSymbol::Xk1:
      return LC::of(VectorSymbol::X) - gamma * (LC::of(VectorSymbol::Gk) + LC::of(VectorSymbol::Sk1));
    case VectorSymbol::Ss:
      return -LC::of(VectorSymbol::Gs);
    default:
      return LC::of(v);
  }
}

template <class Field>
LinearCombination<Field> substitute(const LinearCombination<Field>& a, const Field& gamma) {
  LinearCombination<Field> out;
  for (int i = 0; i < kVectorSymbols; ++i) {
    if (is_zero(a.coeff[i])) continue;
    out += a.coeff[i] * substitution_image(static_cast<VectorSymbol>(i), gamma);
  }
  return out;
}

/// Eliminates Xk1 and Ss from the Gram part.
template <class Field>
SymbolicExpr<Field> substitute(const SymbolicExpr<Field>& e, const Field& gamma) {
  SymbolicExpr<Field> out;
  out.scalar = e.scalar;
  for (int i = 0; i < kVectorSymbols; ++i)
    for (int j = i; j < kVectorSymbols; ++j) {
      const Field& c = e.gram[detail::gram_index(i, j)];
      if (is_zero(c)) continue;
      const bool raw = i >= kCanonicalSymbols || j >= kCanonicalSymbols;
      if (!raw) {
        out.gram[detail::gram_index(i, j)] = out.gram[detail::gram_index(i, j)] + c;
        continue;
      }
      out += c * inner(substitution_image(static_cast<VectorSymbol>(i), gamma),
                       substitution_image(static_cast<VectorSymbol>(j), gamma));
    }
  return out;
}

template <class Field>
bool is_canonical(const SymbolicExpr<Field>& e) {
  for (int i = 0; i < kVectorSymbols; ++i)
    for (int j = i; j < kVectorSymbols; ++j)
      if ((i >= kCanonicalSymbols || j >= kCanonicalSymbols) &&
          !is_zero(e.gram[detail::gram_index(i, j)]))
        return false;
  return true;
}

/// Floating-point values for every symbol.
struct Assignment {
  std::array<Vector, kVectorSymbols> vectors;
  std::array<double, kScalarSymbols> scalars{};
};

inline double evaluate(const SymbolicExpr<Rational>& e, const Assignment& a) {
  double total = 0.0;
  for (int i = 0; i < kScalarSymbols; ++i)
    if (!is_zero(e.scalar[i])) total += to_double(e.scalar[i]) * a.scalars[i];
  for (int i = 0; i < kVectorSymbols; ++i)
    for (int j = i; j < kVectorSymbols; ++j) {
      const Rational& c = e.gram[detail::gram_index(i, j)];
      if (is_zero(c)) continue;
      total += to_double(c) * a.vectors[i].dot(a.vectors[j]);
    }
  return total;
}

}  // namespace pgm
