#pragma once

#include "rttslam/angle.hpp"

namespace rttslam {

// Planar rigid-body pose. theta is kept in (-pi, pi].
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose2() = default;
  Pose2(double x_, double y_, double theta_)
      : x(x_), y(y_), theta(normalize_angle(theta_)) {}
};

// a (+) b: b's translation rotated into a's frame and appended to a.
Pose2 compose(const Pose2& a, const Pose2& b);

// Inverse under compose: compose(a, inverse(a)) is the identity.
Pose2 inverse(const Pose2& a);

// Relative pose inverse(a) (+) b, i.e. the motion taking a to b.
Pose2 between(const Pose2& a, const Pose2& b);

// Componentwise comparison; headings compared by angular distance.
bool approx_equal(const Pose2& a, const Pose2& b, double tol);

}  // namespace rttslam
