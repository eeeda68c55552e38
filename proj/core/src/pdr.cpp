#include "rttslam/pdr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rttslam/errors.hpp"

namespace rttslam {

void PdrConfig::validate(double sample_rate_hz) const {
  if (window_samples < 2) {
    throw ConfigError("pdr.window_samples must be >= 2");
  }
  if (!(stddev_threshold > 0.0)) {
    throw ConfigError("pdr.stddev_threshold must be positive");
  }
  if (!(weinberg_h > 0.0)) {
    throw ConfigError("pdr.weinberg_h must be positive");
  }
  if (!(min_step_duration_s > 0.0)) {
    throw ConfigError("pdr.min_step_duration_s must be positive");
  }
  if (!(lowpass_cutoff_hz > 0.0) || lowpass_cutoff_hz >= 0.5 * sample_rate_hz) {
    throw ConfigError("pdr.lowpass_cutoff_hz must lie in (0, Nyquist)");
  }
}

double accel_magnitude(const ImuSample& sample) {
  const auto& a = sample.accel;
  return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
}

ScalarSeries accel_magnitudes(const std::vector<ImuSample>& imu) {
  ScalarSeries out;
  out.reserve(imu.size());
  for (const ImuSample& s : imu) {
    out.push_back({s.t, accel_magnitude(s)});
  }
  return out;
}

double estimate_sample_rate(const ScalarSeries& series) {
  if (series.size() < 2) {
    throw InputError("cannot estimate sample rate from fewer than 2 samples");
  }
  std::vector<double> dts;
  dts.reserve(series.size() - 1);
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double dt = series[i].t - series[i - 1].t;
    if (!(dt > 0.0)) {
      throw InputError("series timestamps must be strictly increasing");
    }
    dts.push_back(dt);
  }
  std::nth_element(dts.begin(), dts.begin() + dts.size() / 2, dts.end());
  return 1.0 / dts[dts.size() / 2];
}

ScalarSeries lowpass(const ScalarSeries& series, double cutoff_hz) {
  if (series.size() < 2) {
    return series;
  }
  if (!(cutoff_hz > 0.0)) {
    throw ConfigError("lowpass cutoff must be positive");
  }
  const double fs = estimate_sample_rate(series);
  if (cutoff_hz >= 0.5 * fs) {
    throw ConfigError("lowpass cutoff must be below Nyquist");
  }

  // Second-order Butterworth via the bilinear transform.
  const double k = std::tan(kPi * cutoff_hz / fs);
  const double sqrt2 = std::sqrt(2.0);
  const double d = k * k + sqrt2 * k + 1.0;
  const double b0 = k * k / d;
  const double b1 = 2.0 * b0;
  const double b2 = b0;
  const double a1 = 2.0 * (k * k - 1.0) / d;
  const double a2 = (k * k - sqrt2 * k + 1.0) / d;

  // Direct form II transposed, primed to steady state at the first
  // sample so a constant input produces a constant output.
  const double x0 = series.front().value;
  double z1 = x0 * (1.0 - b0);
  double z2 = x0 * (b2 - a2);

  ScalarSeries out;
  out.reserve(series.size());
  for (const TimedScalar& in : series) {
    const double y = b0 * in.value + z1;
    z1 = b1 * in.value - a1 * y + z2;
    z2 = b2 * in.value - a2 * y;
    out.push_back({in.t, y});
  }
  return out;
}

double lowpass_gain(double cutoff_hz, double sample_rate_hz, double freq_hz) {
  const double k = std::tan(kPi * cutoff_hz / sample_rate_hz);
  const double sqrt2 = std::sqrt(2.0);
  const double d = k * k + sqrt2 * k + 1.0;
  const double b0 = k * k / d;
  const double b1 = 2.0 * b0;
  const double b2 = b0;
  const double a1 = 2.0 * (k * k - 1.0) / d;
  const double a2 = (k * k - sqrt2 * k + 1.0) / d;

  const double w = 2.0 * kPi * freq_hz / sample_rate_hz;
  const double c1 = std::cos(w), s1 = std::sin(w);
  const double c2 = std::cos(2.0 * w), s2 = std::sin(2.0 * w);
  const double num_re = b0 + b1 * c1 + b2 * c2;
  const double num_im = -(b1 * s1 + b2 * s2);
  const double den_re = 1.0 + a1 * c1 + a2 * c2;
  const double den_im = -(a1 * s1 + a2 * s2);
  return std::sqrt((num_re * num_re + num_im * num_im) /
                   (den_re * den_re + den_im * den_im));
}

namespace {

// Sample standard deviation over [first, first + count).
double window_stddev(const ScalarSeries& s, std::size_t first,
                     std::size_t count) {
  double mean = 0.0;
  for (std::size_t i = first; i < first + count; ++i) {
    mean += s[i].value;
  }
  mean /= static_cast<double>(count);
  double ss = 0.0;
  for (std::size_t i = first; i < first + count; ++i) {
    const double d = s[i].value - mean;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(count - 1));
}

}  // namespace

std::vector<StepInterval> detect_steps(const ScalarSeries& magnitudes,
                                       const PdrConfig& config) {
  const std::size_t n = magnitudes.size();
  const std::size_t w = static_cast<std::size_t>(config.window_samples);
  if (n < w || w < 2) {
    return {};
  }

  // Centered rolling stddev; edge samples inherit the nearest full
  // window so labels exist for every sample.
  const std::size_t half_lo = (w - 1) / 2;
  std::vector<bool> moving(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t first = i >= half_lo ? i - half_lo : 0;
    first = std::min(first, n - w);
    moving[i] = window_stddev(magnitudes, first, w) > config.stddev_threshold;
  }

  std::vector<StepInterval> steps;
  std::size_t i = 0;
  while (i < n) {
    if (!moving[i]) {
      ++i;
      continue;
    }
    std::size_t burst_end = i;
    while (burst_end + 1 < n && moving[burst_end + 1]) {
      ++burst_end;
    }
    const bool bracketed = i > 0 && burst_end + 1 < n;
    const double duration = magnitudes[burst_end].t - magnitudes[i].t;
    if (bracketed && duration >= config.min_step_duration_s) {
      steps.push_back(
          {magnitudes[i].t, magnitudes[burst_end].t, i, burst_end});
    }
    i = burst_end + 1;
  }
  return steps;
}

double step_length(std::span<const TimedScalar> segment, double h) {
  if (segment.empty()) {
    throw std::invalid_argument("step_length: empty segment");
  }
  double lo = segment[0].value;
  double hi = segment[0].value;
  for (const TimedScalar& s : segment) {
    lo = std::min(lo, s.value);
    hi = std::max(hi, s.value);
  }
  return h * std::pow(hi - lo, 0.25);
}

double tilt_compensated_yaw(const ImuSample& sample) {
  const auto& a = sample.accel;
  const auto& m = sample.mag;
  const double mag_norm =
      std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]);
  if (!(mag_norm > 0.0)) {
    throw InputError("tilt_compensated_yaw: zero-magnitude magnetic vector");
  }
  // Gravity direction from the accelerometer levels the magnetic vector.
  const double roll = std::atan2(a[1], a[2]);
  const double pitch = std::atan2(-a[0], std::hypot(a[1], a[2]));
  const double cr = std::cos(roll), sr = std::sin(roll);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double mx = m[0] * cp + m[1] * sp * sr + m[2] * sp * cr;
  const double my = m[1] * cr - m[2] * sr;
  return normalize_angle(std::atan2(-my, mx));
}

HeadingEstimator::HeadingEstimator(const std::vector<ImuSample>& imu) {
  if (imu.empty()) {
    throw InputError("HeadingEstimator: empty IMU log");
  }
  anchor_yaw_ = tilt_compensated_yaw(imu.front());
  t_.reserve(imu.size());
  yaw_.reserve(imu.size());
  t_.push_back(imu.front().t);
  yaw_.push_back(anchor_yaw_);
  for (std::size_t i = 1; i < imu.size(); ++i) {
    const double dt = imu[i].t - imu[i - 1].t;
    if (!(dt > 0.0)) {
      throw InputError("HeadingEstimator: IMU timestamps must increase");
    }
    const double wz = 0.5 * (imu[i].gyro[2] + imu[i - 1].gyro[2]);
    t_.push_back(imu[i].t);
    yaw_.push_back(yaw_.back() + wz * dt);
  }
}

double HeadingEstimator::heading_at(double t) const {
  if (t <= t_.front()) {
    return normalize_angle(yaw_.front());
  }
  if (t >= t_.back()) {
    return normalize_angle(yaw_.back());
  }
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - t_.begin());
  const double u = (t - t_[j - 1]) / (t_[j] - t_[j - 1]);
  return normalize_angle(yaw_[j - 1] + u * (yaw_[j] - yaw_[j - 1]));
}

double HeadingEstimator::step_heading(double t_start, double t_end) const {
  return heading_at(0.5 * (t_start + t_end));
}

double estimate_heading(const std::vector<ImuSample>& imu, double t_start,
                        double t_end) {
  const bool covered = std::any_of(
      imu.begin(), imu.end(),
      [&](const ImuSample& s) { return s.t >= t_start && s.t <= t_end; });
  if (!covered) {
    throw InputError("estimate_heading: no IMU samples inside step interval");
  }
  return HeadingEstimator(imu).step_heading(t_start, t_end);
}

Trajectory pdr_trajectory(const std::vector<StepEvent>& steps,
                          const Pose2& origin) {
  validate_steps(steps);
  Trajectory traj;
  traj.reserve(steps.size() + 1);
  traj.push_back({steps.empty() ? 0.0 : steps.front().t_start, origin});
  double x = origin.x;
  double y = origin.y;
  for (const StepEvent& s : steps) {
    x += s.length * std::cos(s.heading);
    y += s.length * std::sin(s.heading);
    traj.push_back({s.t_end, Pose2{x, y, s.heading}});
  }
  return traj;
}

PdrResult run_pdr(const std::vector<ImuSample>& imu, const PdrConfig& config,
                  const Pose2& origin) {
  if (imu.size() < 2) {
    throw InputError("run_pdr: IMU log too short");
  }
  const ScalarSeries raw = accel_magnitudes(imu);
  config.validate(estimate_sample_rate(raw));

  PdrResult result;
  result.filtered = lowpass(raw, config.lowpass_cutoff_hz);
  const std::vector<StepInterval> intervals =
      detect_steps(result.filtered, config);

  const HeadingEstimator headings(imu);
  result.steps.reserve(intervals.size());
  std::size_t segment_begin = 0;  // first sample after the previous step
  for (std::size_t j = 0; j < intervals.size(); ++j) {
    const StepInterval& iv = intervals[j];
    const std::span<const TimedScalar> segment{
        result.filtered.data() + segment_begin,
        iv.last_sample + 1 - segment_begin};
    StepEvent step;
    step.index = static_cast<int>(j);
    step.t_start = iv.t_start;
    step.t_end = iv.t_end;
    step.length = step_length(segment, config.weinberg_h);
    step.heading = headings.step_heading(iv.t_start, iv.t_end);
    result.steps.push_back(step);
    segment_begin = iv.last_sample + 1;
  }
  result.trajectory = pdr_trajectory(result.steps, origin);
  return result;
}

}  // namespace rttslam
