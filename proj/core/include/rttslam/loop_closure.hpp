#pragma once

#include <limits>
#include <vector>

#include "rttslam/types.hpp"

namespace rttslam {

struct ClusterConfig {
  double distance_threshold = 1.5;  // meters, in range space
  int min_common_aps = 3;
  double min_separation = 20.0;     // seconds between paired scans
  int max_candidates_per_obs = 3;

  void validate() const;  // throws ConfigError
};

struct RttDistance {
  double distance = std::numeric_limits<double>::infinity();
  int common_ap_count = 0;
};

// Euclidean distance between two observations over the access points
// present in both, rescaled by sqrt(n_ref / n_common) so one threshold
// stays comparable when scans drop entries. n_ref is the number of
// distinct access points seen in the whole session. An empty
// intersection reports +inf.
RttDistance rtt_distance(const RttObservation& a, const RttObservation& b,
                         int n_ref);

int count_session_aps(const std::vector<RttObservation>& observations);

struct LoopClosureCandidate {
  int obs_i = 0;  // later observation
  int obs_k = 0;  // earlier observation, obs_k < obs_i
  double distance = 0.0;
  int common_ap_count = 0;
};

// Pairs each observation with earlier ones at least min_separation
// apart whose range-space distance falls below the threshold; keeps at
// most max_candidates_per_obs smallest-distance partners per
// observation (ties broken toward the earlier partner). Output sorted
// by (obs_i, obs_k).
std::vector<LoopClosureCandidate> detect_loop_closures(
    const std::vector<RttObservation>& observations,
    const ClusterConfig& config);

struct NodeLoopPair {
  int node_i = 0;  // later node
  int node_k = 0;
  double rtt_distance = 0.0;
};

// Maps observation indices to nearest-in-time trajectory nodes (ties
// toward the earlier node), drops pairs landing on identical or
// adjacent nodes, and dedups repeated node pairs keeping the smallest
// distance. Output sorted by (node_i, node_k).
std::vector<NodeLoopPair> attach_to_nodes(
    const std::vector<LoopClosureCandidate>& candidates,
    const std::vector<double>& obs_times,
    const std::vector<double>& node_times);

}  // namespace rttslam
