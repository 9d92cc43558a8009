#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>

#include "sptm/error.hpp"

namespace sptm {

// All probabilities in the library are exact rationals; floating point only
// ever appears in log-space renderings (surprisals, entropies, depths).
using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational pow2(int k) {
  if (k >= 0) return Rational(Int(1) << k);
  return Rational(1, Int(1) << (-k));
}

inline Rational pow_int(const Rational& base, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= base;
  return r;
}

inline double to_double(const Rational& r) {
  return r.convert_to<double>();
}

// log2 of a positive rational, safe for values whose numerator/denominator
// exceed double range.
inline double log2_rational(const Rational& r) {
  if (r <= 0) throw AnalysisError("log2 of non-positive rational " + r.str());
  auto lg = [](const Int& v) -> double {
    std::size_t b = boost::multiprecision::msb(v);
    if (b < 900) return std::log2(v.convert_to<double>());
    Int shifted = v >> (b - 52);
    return static_cast<double>(b - 52) + std::log2(shifted.convert_to<double>());
  };
  return lg(boost::multiprecision::numerator(r)) - lg(boost::multiprecision::denominator(r));
}

// Lossless "p/q" rendering (plain "p" when the denominator is 1).
inline std::string rat_str(const Rational& r) {
  const Int num = boost::multiprecision::numerator(r);
  const Int den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline Rational parse_rational(const std::string& text) {
  auto is_int = [](const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    if (!is_int(text)) throw Error("bad rational: '" + text + "'");
    return Rational(Int(text));
  }
  const std::string num = text.substr(0, slash);
  const std::string den = text.substr(slash + 1);
  if (!is_int(num) || !is_int(den)) throw Error("bad rational: '" + text + "'");
  Int d(den);
  if (d == 0) throw Error("zero denominator in rational: '" + text + "'");
  return Rational(Int(num), d);
}

}  // namespace sptm
