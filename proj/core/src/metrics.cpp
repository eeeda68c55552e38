#include "rttslam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rttslam/errors.hpp"

namespace rttslam {

std::pair<double, double> interpolate_position(const Trajectory& trajectory,
                                               double t) {
  if (trajectory.empty()) {
    throw InputError("interpolate_position: empty trajectory");
  }
  if (t < trajectory.front().t || t > trajectory.back().t) {
    throw InputError("interpolate_position: timestamp outside trajectory span");
  }
  const auto it = std::lower_bound(
      trajectory.begin(), trajectory.end(), t,
      [](const TimedPose& p, double ts) { return p.t < ts; });
  if (it->t == t) {
    return {it->pose.x, it->pose.y};
  }
  const TimedPose& hi = *it;
  const TimedPose& lo = *(it - 1);
  const double u = (t - lo.t) / (hi.t - lo.t);
  return {lo.pose.x + u * (hi.pose.x - lo.pose.x),
          lo.pose.y + u * (hi.pose.y - lo.pose.y)};
}

std::vector<double> per_point_errors(const Trajectory& estimate,
                                     const Trajectory& ground_truth) {
  if (estimate.empty() || ground_truth.empty()) {
    throw InputError("per_point_errors: empty trajectory");
  }
  std::vector<double> errors;
  errors.reserve(estimate.size());
  for (const TimedPose& p : estimate) {
    const auto [gx, gy] = interpolate_position(ground_truth, p.t);
    errors.push_back(std::hypot(p.pose.x - gx, p.pose.y - gy));
  }
  return errors;
}

double rmse(const std::vector<double>& errors) {
  if (errors.empty()) {
    throw std::invalid_argument("rmse: empty error sequence");
  }
  double ss = 0.0;
  for (double e : errors) {
    ss += e * e;
  }
  return std::sqrt(ss / static_cast<double>(errors.size()));
}

double endpoint_error(const Trajectory& estimate,
                      const Trajectory& ground_truth) {
  if (estimate.empty() || ground_truth.empty()) {
    throw InputError("endpoint_error: empty trajectory");
  }
  const TimedPose& last = estimate.back();
  const auto [gx, gy] = interpolate_position(ground_truth, last.t);
  return std::hypot(last.pose.x - gx, last.pose.y - gy);
}

ErrorCdf error_cdf(const std::vector<double>& errors) {
  if (errors.empty()) {
    throw std::invalid_argument("error_cdf: empty error sequence");
  }
  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());

  ErrorCdf out;
  const double n = static_cast<double>(sorted.size());
  out.samples.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out.samples.push_back({sorted[i], static_cast<double>(i + 1) / n});
  }
  const std::size_t idx90 = static_cast<std::size_t>(
      std::ceil(0.9 * n)) - 1;
  out.percentile_90 = sorted[idx90];
  return out;
}

MetricsReport evaluate_trajectory(const Trajectory& estimate,
                                  const Trajectory& ground_truth) {
  const std::vector<double> errors = per_point_errors(estimate, ground_truth);
  MetricsReport report;
  report.rmse = rmse(errors);
  report.endpoint_error = endpoint_error(estimate, ground_truth);
  ErrorCdf cdf = error_cdf(errors);
  report.cdf = std::move(cdf.samples);
  report.percentile_90 = cdf.percentile_90;
  return report;
}

}  // namespace rttslam
