// Exact rational arithmetic plus parsing/rendering helpers.
//
// All probabilities and expected costs in this library are exact rationals;
// decimal strings appear only at output boundaries. GMP's mpq_class keeps
// values canonical (lowest terms, positive denominator) under arithmetic;
// construct values through rat()/parse_rational so that raw two-integer
// constructions are canonicalized as well.
#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace delib {

using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Accepts "153/1000", "-3/4", "7".
inline Rational parse_rational(std::string_view text) {
  const std::string s(text);
  try {
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
      return Rational(BigInt(s));
    }
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("invalid rational '" + s + "'");
  }
}

// Always "num/den", keeping the denominator even when it is 1: "2/1".
inline std::string fraction_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline bool has_terminating_decimal(const Rational& q) {
  BigInt den = q.get_den();
  while (den % 2 == 0) den /= 2;
  while (den % 5 == 0) den /= 5;
  return den == 1;
}

// The exact decimal expansion (shortest string that parses back to q) when it
// terminates, otherwise rounded half-to-even to `fallback_digits` fractional
// digits.
inline std::string decimal_string(const Rational& q, int fallback_digits = 6) {
  const bool negative = q < 0;
  const Rational a = abs(q);
  const BigInt num = a.get_num();
  const BigInt den = a.get_den();
  BigInt integer_part = num / den;
  const BigInt remainder = num % den;

  const std::string sign = negative ? "-" : "";
  if (remainder == 0) return sign + integer_part.get_str();

  if (has_terminating_decimal(a)) {
    int twos = 0, fives = 0;
    BigInt d = den;
    while (d % 2 == 0) {
      d /= 2;
      ++twos;
    }
    while (d % 5 == 0) {
      d /= 5;
      ++fives;
    }
    const int digits = std::max(twos, fives);
    BigInt scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    BigInt frac = remainder * scale / den;  // exact by construction
    std::string text = frac.get_str();
    text.insert(0, static_cast<size_t>(digits) - text.size(), '0');
    while (!text.empty() && text.back() == '0') text.pop_back();
    return sign + integer_part.get_str() + "." + text;
  }

  BigInt scale = 1;
  for (int i = 0; i < fallback_digits; ++i) scale *= 10;
  const BigInt product = remainder * scale;
  BigInt frac = product / den;
  const BigInt rest = product % den;
  const BigInt twice = rest * 2;
  if (twice > den || (twice == den && frac % 2 == 1)) frac += 1;
  if (frac == scale) {
    integer_part += 1;
    frac = 0;
  }
  std::string text = frac.get_str();
  text.insert(0, static_cast<size_t>(fallback_digits) - text.size(), '0');
  return sign + integer_part.get_str() + "." + text;
}

}  // namespace delib
