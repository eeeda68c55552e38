#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rttslam/pdr.hpp"
#include "rttslam/types.hpp"

namespace rttslam {

struct ApSite {
  std::string id;
  double x = 0.0;
  double y = 0.0;
};

// Synthetic walk around a closed waypoint polyline with per-step noise
// and ranging outliers. Everything is a pure function of (config, seed).
struct SimConfig {
  std::vector<std::pair<double, double>> waypoints;  // closed polyline
  int laps = 10;
  double nominal_step_length = 0.7;  // meters
  double step_period = 0.5;          // seconds per step
  double step_length_noise_sigma = 0.0;
  double heading_noise_sigma = 0.0;  // radians per step
  double heading_drift_rate = 0.0;   // radians per step, cumulative
  std::vector<ApSite> ap_positions;
  double rtt_noise_sigma = 0.0;  // meters
  double rtt_outlier_prob = 0.0;
  double rtt_outlier_bias = 0.0;  // meters, positive path lengthening
  double rtt_rate = 5.0;          // Hz
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError

  // 10 m x 5 m rectangle with four corner access points, the desk-scale
  // stand-in for a single-floor home walk.
  static SimConfig home_scenario();
};

struct SimOutput {
  Trajectory ground_truth;
  std::vector<StepEvent> noisy_steps;
  std::vector<RttObservation> rtt_observations;
  // Node pairs whose true positions lie within the revisit radius and
  // whose indices are more than one waypoint leg apart.
  std::vector<std::pair<int, int>> true_loop_pairs;
};

// True positions within this distance count as a revisit.
inline constexpr double kRevisitRadius = 1.0;
// Injected false pairs must be at least this far apart in truth.
inline constexpr double kFalseLoopMinSeparation = 5.0;

SimOutput generate_walk(const SimConfig& config);

// Ranges from the time-interpolated true position to every access
// point, sampled at rtt_rate over [0, walk duration). Gaussian noise
// plus, with rtt_outlier_prob, a positive uniform bias in
// (0, rtt_outlier_bias]. Ranges clamp at zero.
std::vector<RttObservation> synth_rtt(const Trajectory& ground_truth,
                                      const SimConfig& config);

// Appends k uniformly sampled node pairs whose true separation exceeds
// kFalseLoopMinSeparation; throws InputError when no such pair exists.
std::vector<std::pair<int, int>> inject_false_loops(
    const std::vector<std::pair<int, int>>& true_pairs,
    const Trajectory& ground_truth, int k, std::uint64_t seed);

// Raw IMU trace (default 100 Hz) whose step detection under the given
// PdrConfig reproduces the steps: quiet spans separated by one
// magnitude hump per step, heading carried by z-gyro pulses between
// bursts and a magnetometer anchor at the start. Lengths survive the
// low-pass round trip approximately; intended for exercising the
// detection path, not for metric-accuracy tests.
std::vector<ImuSample> synth_imu(const std::vector<StepEvent>& steps,
                                 const PdrConfig& pdr,
                                 double sample_rate_hz = 100.0);

}  // namespace rttslam
