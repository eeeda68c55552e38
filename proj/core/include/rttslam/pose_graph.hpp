#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <utility>
#include <vector>

#include "rttslam/loop_closure.hpp"
#include "rttslam/types.hpp"

namespace rttslam {

// Relative-motion constraint between consecutive nodes.
struct OdometryEdge {
  int from_node = 0;
  int to_node = 0;  // always from_node + 1
  Pose2 measurement;
  Eigen::Matrix3d information = Eigen::Matrix3d::Identity();
};

// Vicinity constraint between two revisited nodes: expected relative
// position is zero, heading unconstrained. rtt_distance records the
// range-space similarity that produced the edge; the solver ignores it.
struct LoopEdge {
  int node_i = 0;  // later node
  int node_k = 0;
  Eigen::Matrix2d information = Eigen::Matrix2d::Identity();
  double rtt_distance = 0.0;
};

struct PoseGraph {
  std::vector<Pose2> nodes;  // node 0 is the gauge anchor
  std::vector<OdometryEdge> odometry_edges;
  std::vector<LoopEdge> loop_edges;

  void validate() const;  // throws InputError
};

// Default per-edge noise model: odometry stddev grows with step length,
// loop slack sits at the scale of one ranging cell.
struct GraphNoiseModel {
  double odo_sigma_xy_per_m = 0.05;
  double odo_sigma_xy_base = 0.01;  // meters
  double odo_sigma_theta = 0.05;    // radians
  double loop_sigma = 1.0;          // meters

  Eigen::Matrix3d odometry_information(double step_length) const;
  Eigen::Matrix2d loop_information() const;
};

// Nodes initialized by dead reckoning from the origin; one odometry
// edge per step measuring the relative pose between consecutive
// dead-reckoned nodes; one loop edge per pair. Pairs referencing
// out-of-range or adjacent nodes are rejected.
PoseGraph build_graph(const std::vector<StepEvent>& steps,
                      const std::vector<NodeLoopPair>& loop_pairs,
                      const Eigen::Matrix3d& odo_info,
                      const Eigen::Matrix2d& loop_info,
                      const Pose2& origin = {});

// Same construction with the step-proportional noise model.
PoseGraph build_graph(const std::vector<StepEvent>& steps,
                      const std::vector<NodeLoopPair>& loop_pairs,
                      const GraphNoiseModel& noise = {},
                      const Pose2& origin = {});

std::vector<NodeLoopPair> as_node_pairs(
    const std::vector<std::pair<int, int>>& pairs);

// Relative-pose error: zero exactly when the realized motion between
// the edge's nodes equals the measurement. Angle component normalized.
Eigen::Vector3d odometry_residual(const OdometryEdge& edge,
                                  const std::vector<Pose2>& nodes);

// Position difference of the paired nodes; invariant to headings.
Eigen::Vector2d loop_residual(const LoopEdge& edge,
                              const std::vector<Pose2>& nodes);

struct Chi2 {
  double odometry = 0.0;
  double loops = 0.0;  // unscaled
};

// Sum of r^T M r per edge family, evaluated at the current nodes.
Chi2 chi2(const PoseGraph& graph);

// Plain-text edge list, one record per line:
//   VERTEX_SE2 id x y theta
//   EDGE_SE2 from to dx dy dtheta  i11 i12 i13 i22 i23 i33
//   EDGE_XY_VICINITY i k  i11 i12 i22  d_rtt
// The SE2 records follow the common graph-file convention so the
// trajectory part loads in other pose-graph tools.
void write_graph(std::ostream& os, const PoseGraph& graph);
PoseGraph read_graph(std::istream& is);

}  // namespace rttslam
