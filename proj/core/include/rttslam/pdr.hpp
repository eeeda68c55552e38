#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rttslam/types.hpp"

namespace rttslam {

// Step detection and dead-reckoning parameters.
struct PdrConfig {
  int window_samples = 25;          // rolling-stddev window (0.25 s at 100 Hz)
  double stddev_threshold = 0.8;    // m/s^2, moving vs. steady
  double weinberg_h = 0.48;         // step-length gain
  double lowpass_cutoff_hz = 3.0;
  double min_step_duration_s = 0.2;

  // Throws ConfigError; the cutoff must sit below Nyquist.
  void validate(double sample_rate_hz) const;
};

struct TimedScalar {
  double t = 0.0;
  double value = 0.0;
};
using ScalarSeries = std::vector<TimedScalar>;

double accel_magnitude(const ImuSample& sample);
ScalarSeries accel_magnitudes(const std::vector<ImuSample>& imu);

// Median sample interval -> rate; throws InputError on fewer than 2
// samples or a non-increasing time base.
double estimate_sample_rate(const ScalarSeries& series);

// Causal second-order Butterworth low pass. Timestamps and length are
// preserved; the filter state starts at steady state so a constant
// series passes through unchanged. Series shorter than 2 samples are
// returned as-is.
ScalarSeries lowpass(const ScalarSeries& series, double cutoff_hz);

// Magnitude response of that filter at freq_hz for a log sampled at
// sample_rate_hz.
double lowpass_gain(double cutoff_hz, double sample_rate_hz, double freq_hz);

// One detected step: the span of movement samples plus their indices
// into the magnitude series.
struct StepInterval {
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t first_sample = 0;
  std::size_t last_sample = 0;
};

// Labels each sample moving/steady by centered rolling stddev against
// the threshold; every movement burst bracketed by steady samples on
// both sides and lasting at least min_step_duration_s becomes one step.
// Fewer than window_samples samples yield an empty result.
std::vector<StepInterval> detect_steps(const ScalarSeries& magnitudes,
                                       const PdrConfig& config);

// Weinberg step length: h * (max - min)^(1/4) over the filtered
// magnitude segment between the previous step and this one.
double step_length(std::span<const TimedScalar> segment, double h);

// Heading over an IMU log: an absolute anchor yaw from the
// tilt-compensated magnetometer at the first sample, then z-axis
// angular-velocity integration from that anchor. The device z-axis is
// assumed near gravity-aligned; full strap-down attitude estimation is
// deliberately out of scope and residual drift is left to the SLAM
// backend.
class HeadingEstimator {
 public:
  explicit HeadingEstimator(const std::vector<ImuSample>& imu);

  double anchor_yaw() const { return anchor_yaw_; }

  // Integrated yaw at time t (clamped to the log span), normalized.
  double heading_at(double t) const;

  // Step heading sampled at the interval midpoint.
  double step_heading(double t_start, double t_end) const;

 private:
  std::vector<double> t_;
  std::vector<double> yaw_;  // unwrapped integrated yaw per sample
  double anchor_yaw_ = 0.0;
};

// Convenience wrapper for a single step; throws InputError when no
// samples fall inside the interval or the anchor magnetometer vector
// has zero magnitude.
double estimate_heading(const std::vector<ImuSample>& imu, double t_start,
                        double t_end);

// Tilt-compensated magnetometer yaw of one sample (gravity direction
// taken from the accelerometer).
double tilt_compensated_yaw(const ImuSample& sample);

// Dead reckoning: advance length * (cos heading, sin heading) per step
// from the origin. Node j carries step j's heading and end timestamp;
// the origin node carries the first step's start time (0 when empty).
Trajectory pdr_trajectory(const std::vector<StepEvent>& steps,
                          const Pose2& origin);

struct PdrResult {
  std::vector<StepEvent> steps;
  Trajectory trajectory;
  ScalarSeries filtered;  // low-passed magnitudes, for diagnostics
};

// Full front end: magnitudes -> low pass -> step detection -> per-step
// Weinberg length and midpoint heading -> dead-reckoned trajectory.
PdrResult run_pdr(const std::vector<ImuSample>& imu, const PdrConfig& config,
                  const Pose2& origin = {});

}  // namespace rttslam
