#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace combnet {

// Loads like 7/15 must compare exactly; everything load-related stays rational.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_ratio(std::int64_t num, std::int64_t den) {
  return Rational(BigInt(num), BigInt(den));
}

// Canonical "num/den" rendering ("0/1" for zero, "3/1" for integers).
inline std::string ratio_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

inline double ratio_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace combnet
