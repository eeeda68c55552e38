#include "rttslam/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "rttslam/errors.hpp"
#include "rttslam/metrics.hpp"

namespace rttslam {

namespace {

constexpr unsigned kWalkStream = 1;
constexpr unsigned kRttStream = 2;
constexpr unsigned kFalseLoopStream = 3;

std::mt19937_64 make_engine(std::uint64_t seed, unsigned stream) {
  std::seed_seq seq{static_cast<unsigned>(seed & 0xffffffffu),
                    static_cast<unsigned>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

struct Polyline {
  std::vector<std::pair<double, double>> points;  // closed: first == last
  std::vector<double> cumulative;                 // arc length at each point
  double perimeter = 0.0;
  double longest_leg = 0.0;

  std::pair<double, double> at_arc(double s) const {
    double sm = std::fmod(s, perimeter);
    if (sm < 0.0) {
      sm += perimeter;
    }
    const auto it =
        std::upper_bound(cumulative.begin(), cumulative.end(), sm);
    std::size_t hi = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative.begin()),
        cumulative.size() - 1);
    const std::size_t lo = hi - 1;
    const double leg = cumulative[hi] - cumulative[lo];
    const double u = leg > 0.0 ? (sm - cumulative[lo]) / leg : 0.0;
    return {points[lo].first + u * (points[hi].first - points[lo].first),
            points[lo].second + u * (points[hi].second - points[lo].second)};
  }
};

Polyline close_polyline(const std::vector<std::pair<double, double>>& wps) {
  Polyline p;
  p.points = wps;
  p.points.push_back(wps.front());
  p.cumulative.resize(p.points.size());
  p.cumulative[0] = 0.0;
  for (std::size_t i = 1; i < p.points.size(); ++i) {
    const double leg = std::hypot(p.points[i].first - p.points[i - 1].first,
                                  p.points[i].second - p.points[i - 1].second);
    p.cumulative[i] = p.cumulative[i - 1] + leg;
    p.longest_leg = std::max(p.longest_leg, leg);
  }
  p.perimeter = p.cumulative.back();
  return p;
}

}  // namespace

void SimConfig::validate() const {
  if (waypoints.size() < 2) {
    throw ConfigError("sim.waypoints needs at least 2 points");
  }
  if (laps < 1) {
    throw ConfigError("sim.laps must be >= 1");
  }
  if (!(nominal_step_length > 0.0)) {
    throw ConfigError("sim.nominal_step_length must be positive");
  }
  if (!(step_period > 0.0)) {
    throw ConfigError("sim.step_period must be positive");
  }
  if (step_length_noise_sigma < 0.0 || heading_noise_sigma < 0.0 ||
      rtt_noise_sigma < 0.0) {
    throw ConfigError("sim noise sigmas must be >= 0");
  }
  if (rtt_outlier_prob < 0.0 || rtt_outlier_prob > 1.0) {
    throw ConfigError("sim.rtt_outlier_prob must lie in [0, 1]");
  }
  if (rtt_outlier_prob > 0.0 && !(rtt_outlier_bias > 0.0)) {
    throw ConfigError("sim.rtt_outlier_bias must be positive when outliers "
                      "are enabled");
  }
  if (!(rtt_rate > 0.0)) {
    throw ConfigError("sim.rtt_rate must be positive");
  }
  if (ap_positions.size() < 3) {
    throw ConfigError("sim needs at least 3 access points");
  }
  std::set<std::string> ids;
  for (const ApSite& ap : ap_positions) {
    if (!ids.insert(ap.id).second) {
      throw ConfigError("sim access point ids must be distinct");
    }
  }
}

SimConfig SimConfig::home_scenario() {
  SimConfig cfg;
  cfg.waypoints = {{0.0, 0.0}, {10.0, 0.0}, {10.0, 5.0}, {0.0, 5.0}};
  cfg.ap_positions = {{"AP0", 0.0, 0.0},
                      {"AP1", 10.0, 0.0},
                      {"AP2", 10.0, 5.0},
                      {"AP3", 0.0, 5.0}};
  return cfg;
}

SimOutput generate_walk(const SimConfig& config) {
  config.validate();
  const Polyline path = close_polyline(config.waypoints);
  if (!(path.perimeter > 0.0)) {
    throw ConfigError("sim.waypoints form a degenerate (zero length) path");
  }

  // Walk leg by leg, truncating the step in progress at every corner
  // so each step is straight and the lengths sum to laps * perimeter.
  std::vector<StepEvent> true_steps;
  const double sliver = 1e-9 * config.nominal_step_length;
  for (int lap = 0; lap < config.laps; ++lap) {
    for (std::size_t leg = 1; leg < path.points.size(); ++leg) {
      const double leg_len = path.cumulative[leg] - path.cumulative[leg - 1];
      if (leg_len <= sliver) {
        continue;
      }
      const double heading = normalize_angle(std::atan2(
          path.points[leg].second - path.points[leg - 1].second,
          path.points[leg].first - path.points[leg - 1].first));
      double walked = 0.0;
      while (leg_len - walked > sliver) {
        const double len =
            std::min(config.nominal_step_length, leg_len - walked);
        const int j = static_cast<int>(true_steps.size());
        StepEvent s;
        s.index = j;
        s.t_start = config.step_period * static_cast<double>(j);
        s.t_end = config.step_period * static_cast<double>(j + 1);
        s.length = len;
        s.heading = heading;
        true_steps.push_back(s);
        walked += len;
      }
    }
  }
  if (true_steps.empty()) {
    throw ConfigError("walk shorter than one step; increase laps");
  }
  const int n_steps = static_cast<int>(true_steps.size());

  SimOutput out;
  out.ground_truth.reserve(true_steps.size() + 1);
  out.ground_truth.push_back(
      {0.0, Pose2{config.waypoints[0].first, config.waypoints[0].second,
                  true_steps.front().heading}});
  for (const StepEvent& s : true_steps) {
    const Pose2& prev = out.ground_truth.back().pose;
    out.ground_truth.push_back(
        {s.t_end, Pose2{prev.x + s.length * std::cos(s.heading),
                        prev.y + s.length * std::sin(s.heading), s.heading}});
  }
  std::vector<std::pair<double, double>> positions;
  positions.reserve(out.ground_truth.size());
  for (const TimedPose& tp : out.ground_truth) {
    positions.emplace_back(tp.pose.x, tp.pose.y);
  }

  // Per-step noise plus a cumulative heading bias that mimics gyro
  // drift. Standard normals are always drawn so the stream layout does
  // not depend on the sigmas.
  std::mt19937_64 rng = make_engine(config.seed, kWalkStream);
  std::normal_distribution<double> gauss(0.0, 1.0);
  out.noisy_steps = true_steps;
  for (std::size_t j = 0; j < out.noisy_steps.size(); ++j) {
    StepEvent& s = out.noisy_steps[j];
    const double len_noise = config.step_length_noise_sigma * gauss(rng);
    const double head_noise = config.heading_noise_sigma * gauss(rng);
    const double drift =
        config.heading_drift_rate * static_cast<double>(j + 1);
    s.length = std::max(0.0, s.length + len_noise);
    s.heading = normalize_angle(s.heading + head_noise + drift);
  }

  out.rtt_observations = synth_rtt(out.ground_truth, config);

  // Revisits: nodes within the revisit radius whose indices are more
  // than one waypoint leg of steps apart.
  const int min_gap = std::max(
      2, static_cast<int>(
             std::ceil(path.longest_leg / config.nominal_step_length)) +
             1);
  for (int i = 0; i <= n_steps; ++i) {
    for (int k = 0; k + min_gap <= i; ++k) {
      const auto& a = positions[static_cast<std::size_t>(i)];
      const auto& b = positions[static_cast<std::size_t>(k)];
      if (std::hypot(a.first - b.first, a.second - b.second) <=
          kRevisitRadius) {
        out.true_loop_pairs.emplace_back(i, k);
      }
    }
  }
  return out;
}

std::vector<RttObservation> synth_rtt(const Trajectory& ground_truth,
                                      const SimConfig& config) {
  if (ground_truth.empty() || config.ap_positions.empty()) {
    throw InputError("synth_rtt: empty trajectory or access point set");
  }
  const double duration = ground_truth.back().t - ground_truth.front().t;
  const int count =
      static_cast<int>(std::ceil(duration * config.rtt_rate));

  std::mt19937_64 rng = make_engine(config.seed, kRttStream);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<RttObservation> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) {
    RttObservation obs;
    obs.t = ground_truth.front().t + static_cast<double>(k) / config.rtt_rate;
    const auto [px, py] = interpolate_position(ground_truth, obs.t);
    for (const ApSite& ap : config.ap_positions) {
      double range = std::hypot(px - ap.x, py - ap.y) +
                     config.rtt_noise_sigma * gauss(rng);
      if (unit(rng) < config.rtt_outlier_prob) {
        // (0, bias]: positive path lengthening, never exactly zero.
        range += (1.0 - unit(rng)) * config.rtt_outlier_bias;
      }
      RttRange r;
      r.range_m = std::max(0.0, range);
      if (config.rtt_noise_sigma > 0.0) {
        r.stddev_m = config.rtt_noise_sigma;
      }
      obs.ranges.emplace(ap.id, r);
    }
    out.push_back(std::move(obs));
  }
  return out;
}

std::vector<std::pair<int, int>> inject_false_loops(
    const std::vector<std::pair<int, int>>& true_pairs,
    const Trajectory& ground_truth, int k, std::uint64_t seed) {
  if (k < 0) {
    throw std::invalid_argument("inject_false_loops: negative count");
  }
  std::vector<std::pair<int, int>> out = true_pairs;
  if (k == 0) {
    return out;
  }
  const int n = static_cast<int>(ground_truth.size());

  const auto distant = [&](int a, int b) {
    const Pose2& pa = ground_truth[static_cast<std::size_t>(a)].pose;
    const Pose2& pb = ground_truth[static_cast<std::size_t>(b)].pose;
    return std::hypot(pa.x - pb.x, pa.y - pb.y) > kFalseLoopMinSeparation;
  };

  bool feasible = false;
  for (int i = 0; i < n && !feasible; ++i) {
    for (int j = i + 2; j < n && !feasible; ++j) {
      feasible = distant(i, j);
    }
  }
  if (!feasible) {
    throw InputError("inject_false_loops: no node pair farther than the "
                     "false-loop separation exists");
  }

  std::set<std::pair<int, int>> used(out.begin(), out.end());
  std::mt19937_64 rng = make_engine(seed, kFalseLoopStream);
  std::uniform_int_distribution<int> pick(0, n - 1);
  int added = 0;
  long attempts = 0;
  while (added < k) {
    if (++attempts > 1000000L) {
      throw InputError("inject_false_loops: sampling did not terminate");
    }
    int i = pick(rng);
    int j = pick(rng);
    if (i < j) {
      std::swap(i, j);
    }
    if (i - j < 2 || !distant(i, j)) {
      continue;
    }
    if (!used.insert({i, j}).second) {
      continue;
    }
    out.emplace_back(i, j);
    ++added;
  }
  return out;
}

std::vector<ImuSample> synth_imu(const std::vector<StepEvent>& steps,
                                 const PdrConfig& pdr,
                                 double sample_rate_hz) {
  validate_steps(steps);
  if (steps.empty()) {
    throw InputError("synth_imu: no steps");
  }
  const double dt = 1.0 / sample_rate_hz;
  const double lead = 0.5;  // quiet anchor span before the first step
  const double tail = 0.5;
  const double t0 = steps.front().t_start - lead;
  const long n = std::lround((steps.back().t_end + tail - t0) / dt) + 1;

  constexpr double kGravity = 9.81;
  constexpr double kMagHorizontal = 22.0;  // microtesla
  constexpr double kMagVertical = -43.0;

  const auto grid = [&](double t) {
    return std::clamp<long>(std::lround((t - t0) / dt), 0, n - 1);
  };

  std::vector<double> magnitude(static_cast<std::size_t>(n), kGravity);
  std::vector<double> gyro_z(static_cast<std::size_t>(n), 0.0);

  double prev_heading = steps.front().heading;
  for (const StepEvent& s : steps) {
    const double span = s.t_end - s.t_start;
    // Rotation pulse over the first 30% of the step period, then a
    // magnitude hump over [40%, 80%]; the rest stays quiet so the
    // rolling-stddev detector sees steady brackets.
    const long rot_a = grid(s.t_start);
    const long rot_b = grid(s.t_start + 0.3 * span);
    const double delta = angle_diff(s.heading, prev_heading);
    const long interior = rot_b - rot_a - 1;
    if (interior > 0 && delta != 0.0) {
      const double rate = delta / (static_cast<double>(interior) * dt);
      for (long i = rot_a + 1; i < rot_b; ++i) {
        gyro_z[static_cast<std::size_t>(i)] = rate;
      }
    }

    const long hump_a = grid(s.t_start + 0.4 * span);
    const long hump_b = grid(s.t_start + 0.8 * span);
    if (hump_b > hump_a && s.length > 0.0) {
      const double hump_duration = static_cast<double>(hump_b - hump_a) * dt;
      const double hump_freq = 1.0 / (2.0 * hump_duration);
      const double gain =
          lowpass_gain(pdr.lowpass_cutoff_hz, sample_rate_hz, hump_freq);
      const double target = std::pow(s.length / pdr.weinberg_h, 4.0);
      const double amplitude = target / gain;
      for (long i = hump_a; i <= hump_b; ++i) {
        const double u = static_cast<double>(i - hump_a) /
                         static_cast<double>(hump_b - hump_a);
        magnitude[static_cast<std::size_t>(i)] +=
            amplitude * std::sin(kPi * u);
      }
    }
    prev_heading = s.heading;
  }

  // Integrate yaw with the same trapezoid the heading estimator uses so
  // the magnetometer stays consistent with the gyro stream.
  std::vector<ImuSample> out(static_cast<std::size_t>(n));
  double yaw = steps.front().heading;
  for (long i = 0; i < n; ++i) {
    if (i > 0) {
      yaw += 0.5 *
             (gyro_z[static_cast<std::size_t>(i)] +
              gyro_z[static_cast<std::size_t>(i - 1)]) *
             dt;
    }
    ImuSample& s = out[static_cast<std::size_t>(i)];
    s.t = t0 + static_cast<double>(i) * dt;
    s.accel = {0.0, 0.0, magnitude[static_cast<std::size_t>(i)]};
    s.gyro = {0.0, 0.0, gyro_z[static_cast<std::size_t>(i)]};
    s.mag = {kMagHorizontal * std::cos(yaw), -kMagHorizontal * std::sin(yaw),
             kMagVertical};
  }
  return out;
}

}  // namespace rttslam
