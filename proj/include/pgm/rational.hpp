#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pgm {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses "p", "-p" or "p/q" exactly. Decimal notation is rejected so that a
/// value like "0.1" can never reach an exact computation as a binary float.
inline Rational parse_rational(std::string_view text) {
  auto is_integer = [](std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char ch : s)
      if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    return true;
  };
  auto to_int = [](std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    return BigInt(std::string(s));
  };
  const auto slash = text.find('/');
  const std::string_view num = text.substr(0, slash);
  const std::string_view den = slash == std::string_view::npos ? "1" : text.substr(slash + 1);
  if (!is_integer(num) || !is_integer(den) || den.front() == '-' || den.front() == '+')
    throw std::invalid_argument("not an exact rational (expected p or p/q): " + std::string(text));
  const BigInt d = to_int(den);
  if (d == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
  return Rational(to_int(num), d);
}

inline std::string to_string(const Rational& r) { return r.str(); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline bool is_zero(const Rational& r) { return r == 0; }

}  // namespace pgm
