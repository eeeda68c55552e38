#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rttslam/pose2.hpp"

namespace rttslam {

// One inertial sample. Triples are (x, y, z) in the device frame;
// timestamps are seconds relative to log start.
struct ImuSample {
  double t = 0.0;
  std::array<double, 3> accel{};  // m/s^2
  std::array<double, 3> gyro{};   // rad/s
  std::array<double, 3> mag{};    // microtesla
};

// One detected step with its dead-reckoning parameters.
struct StepEvent {
  int index = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  double length = 0.0;   // meters, >= 0
  double heading = 0.0;  // radians, world frame, in (-pi, pi]
};

struct RttRange {
  double range_m = 0.0;
  std::optional<double> stddev_m;
};

// Ranges seen at one scan instant, keyed by access-point id.
struct RttObservation {
  double t = 0.0;
  std::map<std::string, RttRange> ranges;
};

struct TimedPose {
  double t = 0.0;
  Pose2 pose;
};

using Trajectory = std::vector<TimedPose>;

// Boundary validators; throw InputError with a description of the
// first violated invariant.
void validate_steps(const std::vector<StepEvent>& steps);
void validate_trajectory(const Trajectory& trajectory);
void validate_observations(const std::vector<RttObservation>& observations);

}  // namespace rttslam
