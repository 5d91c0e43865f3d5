#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dgl {

// Exact rational arithmetic everywhere; the kernel never touches floating point.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline Rational rat(long n) { return Rational(n); }
inline Rational rat(long n, long d) { return Rational(n, d); }

inline Rational pow_nat(const Rational& base, unsigned exponent) {
  Rational acc(1);
  Rational b = base;
  unsigned e = exponent;
  while (e > 0) {
    if (e & 1u) acc *= b;
    b *= b;
    e >>= 1u;
  }
  return acc;
}

// Accepts "42", "-3", "2.5", "-0.125", "7/2", "-1/3".
inline std::optional<Rational> parse_rational(std::string_view s) {
  if (s.empty()) return std::nullopt;
  bool neg = false;
  size_t i = 0;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    i = 1;
  }
  Integer num = 0, den = 1;
  bool digits = false;
  for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
    num = num * 10 + (s[i] - '0');
    digits = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    bool frac = false;
    for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
      num = num * 10 + (s[i] - '0');
      den *= 10;
      frac = true;
    }
    if (!frac) return std::nullopt;
  } else if (i < s.size() && s[i] == '/') {
    ++i;
    Integer d = 0;
    bool ddigits = false;
    for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
      d = d * 10 + (s[i] - '0');
      ddigits = true;
    }
    if (!ddigits || d == 0) return std::nullopt;
    den = d;
  }
  if (!digits || i != s.size()) return std::nullopt;
  Rational r(num, den);
  return neg ? Rational(-r) : r;
}

// "p" for integers, "p/q" otherwise.
inline std::string format_rational(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

// Exact finite decimal form, e.g. -3, 2.5, 0.125. Only rationals whose
// denominator is 2^a*5^b have one; everything the parser and kernel produce
// from decimal literals stays in that class (it is closed under +, *, ^).
inline std::optional<std::string> format_decimal(const Rational& r) {
  Integer num = numerator(r);
  Integer den = denominator(r);
  bool neg = num < 0;
  if (neg) num = -num;
  unsigned twos = 0, fives = 0;
  Integer d = den;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d != 1) return std::nullopt;
  unsigned digits = twos > fives ? twos : fives;
  for (unsigned k = fives; k < twos; ++k) num *= 5;
  for (unsigned k = twos; k < fives; ++k) num *= 2;
  std::string s = num.str();
  std::string out = neg ? "-" : "";
  if (digits == 0) return out + s;
  while (s.size() <= digits) s.insert(s.begin(), '0');
  out += s.substr(0, s.size() - digits);
  std::string frac = s.substr(s.size() - digits);
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  if (frac.empty()) return out;
  return out + "." + frac;
}

}  // namespace dgl
