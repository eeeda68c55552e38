#pragma once

#include <cmath>
#include <stdexcept>

namespace rttslam {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Wraps an angle to (-pi, pi]. The half-turn maps to +pi so every
// orientation has exactly one representation.
inline double normalize_angle(double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("normalize_angle: non-finite angle");
  }
  double a = std::remainder(theta, 2.0 * kPi);
  if (a <= -kPi) {
    a += 2.0 * kPi;
  }
  return a;
}

// Signed difference a - b wrapped to (-pi, pi].
inline double angle_diff(double a, double b) { return normalize_angle(a - b); }

}  // namespace rttslam
