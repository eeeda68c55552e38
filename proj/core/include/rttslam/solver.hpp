#pragma once

#include <Eigen/Core>
#include <vector>

#include "rttslam/pose_graph.hpp"

namespace rttslam {

struct SolverConfig {
  double free_parameter_c = 1.0;  // scaling breakpoint; s < 1 above it
  int max_iterations = 100;
  double rel_cost_tolerance = 1e-9;
  double step_tolerance = 1e-10;
  double initial_damping = 1e-6;
  bool robust_enabled = true;

  void validate() const;  // throws ConfigError
};

// Dynamic covariance scaling weight min(1, 2c / (c + chi_squared)).
// Equals 1 up to chi_squared = c, then decays toward 0.
double scaling_factor(double chi_squared, double c);

// Robust cost of one loop edge as a function of its squared error:
// quadratic up to c, saturating at 3c beyond it. Its derivative is the
// squared scaling factor, which makes the reweighted normal equations
// a descent scheme for this objective.
double robust_loop_cost(double chi_squared, double c);

struct SolveReport {
  int iterations_used = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  std::vector<double> loop_scaling;  // final s per loop edge, in (0, 1]
  bool converged = false;
  std::vector<double> cost_trace;  // objective after each accepted step
};

struct SolveResult {
  PoseGraph graph;
  SolveReport report;
};

// Minimizes the robust objective over all node poses except node 0
// (the gauge anchor, left bitwise untouched). Damped iterative
// linearization: loop-edge weights are recomputed from the current
// residuals once per iteration and held fixed through the linear
// solve; steps are accepted only when the objective decreases, with
// multiplicative damping on rejection. With robust_enabled = false all
// weights are 1 and the traditional equally-weighted objective is
// minimized. Deterministic for identical inputs. Throws SolverError on
// singular normal equations after damping escalation or a non-finite
// cost.
SolveResult optimize(const PoseGraph& graph, const SolverConfig& config);

// Current s per loop edge without modifying the graph.
std::vector<double> loop_edge_weights(const PoseGraph& graph, double c);

// Analytic residual Jacobians in the additive (x, y, theta)
// parameterization used by the solver; exposed so tests can check them
// against finite differences.
struct OdometryJacobians {
  Eigen::Matrix3d j_from;
  Eigen::Matrix3d j_to;
};
OdometryJacobians odometry_jacobians(const OdometryEdge& edge,
                                     const std::vector<Pose2>& nodes);

struct LoopJacobians {
  Eigen::Matrix<double, 2, 3> j_i;
  Eigen::Matrix<double, 2, 3> j_k;
};
LoopJacobians loop_jacobians(const LoopEdge& edge,
                             const std::vector<Pose2>& nodes);

}  // namespace rttslam
