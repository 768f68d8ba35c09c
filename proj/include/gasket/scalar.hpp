#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

#include "gasket/error.hpp"

namespace gasket {

// Exact scalar used wherever the source identities are exact statements.
using Rational = boost::multiprecision::mpq_rational;

template <class S>
inline constexpr bool is_exact_v = false;
template <>
inline constexpr bool is_exact_v<Rational> = true;

inline double to_double(const Rational& x) { return x.template convert_to<double>(); }
inline constexpr double to_double(double x) { return x; }

template <class S>
inline S fraction(long num, long den) {
  if constexpr (is_exact_v<S>)
    return Rational(num, den);
  else
    return static_cast<double>(num) / static_cast<double>(den);
}

// (num/den)^m by repeated multiplication; deterministic in floating mode.
template <class S>
inline S ratio_pow(long num, long den, int m) {
  S base = fraction<S>(num, den);
  S acc = fraction<S>(1, 1);
  for (int i = 0; i < m; ++i) acc *= base;
  return acc;
}

inline std::string format_scalar(const Rational& x) {
  const auto num = numerator(x);
  const auto den = denominator(x);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline std::string format_scalar(double x) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, p);
}

// Accepts "p/q", integers and plain decimals ("-0.25", "3e-2" is rejected).
inline Rational parse_rational(std::string_view s) {
  try {
    auto slash = s.find('/');
    if (slash != std::string_view::npos) {
      Rational num{std::string(s.substr(0, slash))};
      Rational den{std::string(s.substr(slash + 1))};
      if (den == 0) throw ParseError("zero denominator in '" + std::string(s) + "'");
      return num / den;
    }
    auto dot = s.find('.');
    if (dot == std::string_view::npos) return Rational{std::string(s)};
    std::string digits = std::string(s.substr(0, dot)) + std::string(s.substr(dot + 1));
    size_t frac_len = s.size() - dot - 1;
    Rational num{digits};
    Rational den = 1;
    for (size_t i = 0; i < frac_len; ++i) den *= 10;
    return num / den;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("cannot parse rational '" + std::string(s) + "'");
  }
}

template <class S>
inline S parse_scalar(std::string_view s) {
  if constexpr (is_exact_v<S>) {
    return parse_rational(s);
  } else {
    try {
      size_t pos = 0;
      std::string str(s);
      auto slash = str.find('/');
      if (slash != std::string::npos)
        return std::stod(str.substr(0, slash)) / std::stod(str.substr(slash + 1));
      double v = std::stod(str, &pos);
      if (pos != str.size()) throw ParseError("trailing characters in number '" + str + "'");
      return v;
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      throw ParseError("cannot parse number '" + std::string(s) + "'");
    }
  }
}

}  // namespace gasket
