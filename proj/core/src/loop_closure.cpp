#include "rttslam/loop_closure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "rttslam/errors.hpp"

namespace rttslam {

void ClusterConfig::validate() const {
  if (!(distance_threshold > 0.0)) {
    throw ConfigError("cluster.distance_threshold must be positive");
  }
  if (min_common_aps < 2) {
    throw ConfigError("cluster.min_common_aps must be >= 2");
  }
  if (!(min_separation > 0.0)) {
    throw ConfigError("cluster.min_separation must be positive");
  }
  if (max_candidates_per_obs < 1) {
    throw ConfigError("cluster.max_candidates_per_obs must be >= 1");
  }
}

RttDistance rtt_distance(const RttObservation& a, const RttObservation& b,
                         int n_ref) {
  double sq = 0.0;
  int common = 0;
  // Both maps are ordered by ap id; walk them in lockstep.
  auto ia = a.ranges.begin();
  auto ib = b.ranges.begin();
  while (ia != a.ranges.end() && ib != b.ranges.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      const double d = ia->second.range_m - ib->second.range_m;
      sq += d * d;
      ++common;
      ++ia;
      ++ib;
    }
  }
  if (common == 0) {
    return {};
  }
  const double scale =
      std::sqrt(static_cast<double>(n_ref) / static_cast<double>(common));
  return {std::sqrt(sq) * scale, common};
}

int count_session_aps(const std::vector<RttObservation>& observations) {
  std::set<std::string> aps;
  for (const RttObservation& o : observations) {
    for (const auto& [ap, r] : o.ranges) {
      aps.insert(ap);
    }
  }
  return static_cast<int>(aps.size());
}

std::vector<LoopClosureCandidate> detect_loop_closures(
    const std::vector<RttObservation>& observations,
    const ClusterConfig& config) {
  config.validate();
  validate_observations(observations);
  const int n_ref = count_session_aps(observations);

  std::vector<LoopClosureCandidate> out;
  std::vector<LoopClosureCandidate> current;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    current.clear();
    for (std::size_t k = 0; k < i; ++k) {
      if (observations[i].t - observations[k].t < config.min_separation) {
        break;  // later k are closer in time
      }
      const RttDistance d =
          rtt_distance(observations[i], observations[k], n_ref);
      if (d.common_ap_count >= config.min_common_aps &&
          d.distance < config.distance_threshold) {
        current.push_back({static_cast<int>(i), static_cast<int>(k),
                           d.distance, d.common_ap_count});
      }
    }
    std::sort(current.begin(), current.end(),
              [](const LoopClosureCandidate& a, const LoopClosureCandidate& b) {
                return a.distance != b.distance ? a.distance < b.distance
                                                : a.obs_k < b.obs_k;
              });
    if (current.size() > static_cast<std::size_t>(config.max_candidates_per_obs)) {
      current.resize(static_cast<std::size_t>(config.max_candidates_per_obs));
    }
    std::sort(current.begin(), current.end(),
              [](const LoopClosureCandidate& a, const LoopClosureCandidate& b) {
                return a.obs_k < b.obs_k;
              });
    out.insert(out.end(), current.begin(), current.end());
  }
  return out;
}

namespace {

// Nearest node by time; equidistant timestamps resolve to the earlier
// node.
int nearest_node(const std::vector<double>& node_times, double t) {
  const auto it = std::lower_bound(node_times.begin(), node_times.end(), t);
  if (it == node_times.begin()) {
    return 0;
  }
  if (it == node_times.end()) {
    return static_cast<int>(node_times.size()) - 1;
  }
  const std::size_t hi = static_cast<std::size_t>(it - node_times.begin());
  const std::size_t lo = hi - 1;
  return t - node_times[lo] <= node_times[hi] - t ? static_cast<int>(lo)
                                                  : static_cast<int>(hi);
}

}  // namespace

std::vector<NodeLoopPair> attach_to_nodes(
    const std::vector<LoopClosureCandidate>& candidates,
    const std::vector<double>& obs_times,
    const std::vector<double>& node_times) {
  if (node_times.empty()) {
    throw InputError("attach_to_nodes: empty node time list");
  }
  for (std::size_t i = 1; i < node_times.size(); ++i) {
    if (!(node_times[i - 1] < node_times[i])) {
      throw InputError("attach_to_nodes: node times must strictly increase");
    }
  }

  std::map<std::pair<int, int>, double> best;
  for (const LoopClosureCandidate& c : candidates) {
    if (c.obs_i < 0 || static_cast<std::size_t>(c.obs_i) >= obs_times.size() ||
        c.obs_k < 0 || static_cast<std::size_t>(c.obs_k) >= obs_times.size()) {
      throw InputError("attach_to_nodes: candidate references unknown observation");
    }
    int ni = nearest_node(node_times, obs_times[static_cast<std::size_t>(c.obs_i)]);
    int nk = nearest_node(node_times, obs_times[static_cast<std::size_t>(c.obs_k)]);
    if (ni < nk) {
      std::swap(ni, nk);
    }
    if (ni - nk < 2) {
      continue;  // identical or adjacent nodes carry no loop information
    }
    const auto key = std::make_pair(ni, nk);
    const auto it = best.find(key);
    if (it == best.end() || c.distance < it->second) {
      best[key] = c.distance;
    }
  }

  std::vector<NodeLoopPair> out;
  out.reserve(best.size());
  for (const auto& [key, dist] : best) {
    out.push_back({key.first, key.second, dist});
  }
  return out;
}

}  // namespace rttslam
