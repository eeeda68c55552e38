#include "rttslam/types.hpp"

#include <cmath>
#include <string>

#include "rttslam/errors.hpp"

namespace rttslam {

void validate_steps(const std::vector<StepEvent>& steps) {
  int last_index = -1;
  double last_end = -std::numeric_limits<double>::infinity();
  for (const StepEvent& s : steps) {
    if (!(s.t_start < s.t_end)) {
      throw InputError("step " + std::to_string(s.index) +
                       ": t_start must precede t_end");
    }
    if (s.length < 0.0 || !std::isfinite(s.length)) {
      throw InputError("step " + std::to_string(s.index) +
                       ": negative or non-finite length");
    }
    if (s.index <= last_index) {
      throw InputError("step indices must be strictly increasing");
    }
    if (s.t_start < last_end) {
      throw InputError("step " + std::to_string(s.index) +
                       ": overlaps previous step");
    }
    last_index = s.index;
    last_end = s.t_end;
  }
}

void validate_trajectory(const Trajectory& trajectory) {
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    if (!(trajectory[i - 1].t < trajectory[i].t)) {
      throw InputError("trajectory timestamps must be strictly increasing");
    }
  }
}

void validate_observations(const std::vector<RttObservation>& observations) {
  double last_t = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const RttObservation& o = observations[i];
    if (o.ranges.empty()) {
      throw InputError("observation " + std::to_string(i) + ": no ranges");
    }
    if (!(o.t > last_t)) {
      throw InputError("observation timestamps must be strictly increasing");
    }
    for (const auto& [ap, r] : o.ranges) {
      if (!std::isfinite(r.range_m) || r.range_m < 0.0) {
        throw InputError("observation " + std::to_string(i) + ", ap " + ap +
                         ": range must be finite and non-negative");
      }
    }
    last_t = o.t;
  }
}

}  // namespace rttslam
