#pragma once

#include <utility>
#include <vector>

#include "rttslam/types.hpp"

namespace rttslam {

struct CdfSample {
  double error = 0.0;
  double fraction = 0.0;
};

struct MetricsReport {
  double rmse = 0.0;
  double endpoint_error = 0.0;
  std::vector<CdfSample> cdf;
  double percentile_90 = 0.0;
};

// Linear position interpolation at time t; throws InputError when t
// falls outside the trajectory's time span.
std::pair<double, double> interpolate_position(const Trajectory& trajectory,
                                               double t);

// Planar distance from each estimate point to the ground truth
// interpolated at the same timestamp. No alignment transform: both
// trajectories share the anchored origin.
std::vector<double> per_point_errors(const Trajectory& estimate,
                                     const Trajectory& ground_truth);

double rmse(const std::vector<double>& errors);

double endpoint_error(const Trajectory& estimate,
                      const Trajectory& ground_truth);

struct ErrorCdf {
  std::vector<CdfSample> samples;
  double percentile_90 = 0.0;
};

// Empirical CDF over sorted errors; percentile_90 is the smallest
// error whose cumulative fraction reaches 0.9 (ceiling order
// statistic, no interpolation).
ErrorCdf error_cdf(const std::vector<double>& errors);

MetricsReport evaluate_trajectory(const Trajectory& estimate,
                                  const Trajectory& ground_truth);

}  // namespace rttslam
