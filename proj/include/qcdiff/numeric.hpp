#ifndef QCDIFF_NUMERIC_HPP
#define QCDIFF_NUMERIC_HPP

#include <cmath>

#include "qcdiff/common.hpp"

namespace qcdiff {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// e^{i theta}, evaluated so that unit_phase(-theta) is the bit-exact
/// conjugate of unit_phase(theta).  Every phase factor in the library goes
/// through here; Hermitian symmetries of the estimators then hold exactly
/// instead of only up to libm quirks.
inline Complex unit_phase(double theta) {
  const double a = std::fabs(theta);
  const double re = std::cos(a);
  const double im = std::sin(a);
  return {re, theta < 0.0 ? -im : im};
}

/// sin(z)/z with the removable singularity filled in; even in z by
/// construction.
inline double sinc(double z) {
  const double a = std::fabs(z);
  if (a < 1e-8) return 1.0 - z * z / 6.0;
  return std::sin(a) / a;
}

/// (e^z - 1)/z for complex z, stable near 0.
inline Complex expm1_over(Complex z) {
  if (std::abs(z) < 1e-6) return 1.0 + z / 2.0 + z * z / 6.0;
  return (std::exp(z) - 1.0) / z;
}

}  // namespace qcdiff

#endif  // QCDIFF_NUMERIC_HPP
