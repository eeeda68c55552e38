#include "rttslam/pose2.hpp"

#include <cmath>

namespace rttslam {

Pose2 compose(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return {a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y,
          normalize_angle(a.theta + b.theta)};
}

Pose2 inverse(const Pose2& a) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return {-c * a.x - s * a.y, s * a.x - c * a.y, normalize_angle(-a.theta)};
}

Pose2 between(const Pose2& a, const Pose2& b) { return compose(inverse(a), b); }

bool approx_equal(const Pose2& a, const Pose2& b, double tol) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol &&
         std::abs(angle_diff(a.theta, b.theta)) <= tol;
}

}  // namespace rttslam
