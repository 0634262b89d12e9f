#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace otfs::detail {

// e^{j 2pi num / den}. num is reduced mod den before the division so large
// index products keep full phase precision.
inline std::complex<double> unit_phase(long long num, long long den) {
  num %= den;
  if (num < 0) num += den;
  const double a = 2.0 * std::numbers::pi * static_cast<double>(num) /
                   static_cast<double>(den);
  return {std::cos(a), std::sin(a)};
}

inline long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline long long mod(long long a, long long b) {
  const long long r = a % b;
  return r < 0 ? r + b : r;
}

}  // namespace otfs::detail
