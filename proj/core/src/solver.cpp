#include "rttslam/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rttslam/errors.hpp"

namespace rttslam {

void SolverConfig::validate() const {
  if (!(free_parameter_c > 0.0)) {
    throw ConfigError("solver.free_parameter_c must be positive");
  }
  if (max_iterations < 1) {
    throw ConfigError("solver.max_iterations must be >= 1");
  }
  if (!(rel_cost_tolerance > 0.0) || !(step_tolerance > 0.0)) {
    throw ConfigError("solver tolerances must be positive");
  }
  if (initial_damping < 0.0) {
    throw ConfigError("solver.initial_damping must be >= 0");
  }
}

double scaling_factor(double chi_squared, double c) {
  if (!(c > 0.0)) {
    throw std::invalid_argument("scaling_factor: c must be positive");
  }
  if (chi_squared < 0.0) {
    throw std::invalid_argument("scaling_factor: negative squared error");
  }
  return std::min(1.0, 2.0 * c / (c + chi_squared));
}

double robust_loop_cost(double chi_squared, double c) {
  if (chi_squared <= c) {
    return chi_squared;
  }
  return 3.0 * c - 4.0 * c * c / (c + chi_squared);
}

OdometryJacobians odometry_jacobians(const OdometryEdge& edge,
                                     const std::vector<Pose2>& nodes) {
  const Pose2& from = nodes[static_cast<std::size_t>(edge.from_node)];
  const Pose2& to = nodes[static_cast<std::size_t>(edge.to_node)];

  const double ci = std::cos(from.theta), si = std::sin(from.theta);
  const double cz = std::cos(edge.measurement.theta);
  const double sz = std::sin(edge.measurement.theta);

  Eigen::Matrix2d rot_i_t;  // R(from)^T
  rot_i_t << ci, si, -si, ci;
  Eigen::Matrix2d rot_z_t;  // R(measurement)^T
  rot_z_t << cz, sz, -sz, cz;
  Eigen::Matrix2d drot_i_t;  // d/dtheta R(from)^T
  drot_i_t << -si, ci, -ci, -si;

  const Eigen::Vector2d q(to.x - from.x, to.y - from.y);
  const Eigen::Matrix2d a = rot_z_t * rot_i_t;

  OdometryJacobians jac;
  jac.j_from.setZero();
  jac.j_from.topLeftCorner<2, 2>() = -a;
  jac.j_from.topRightCorner<2, 1>() = rot_z_t * (drot_i_t * q);
  jac.j_from(2, 2) = -1.0;
  jac.j_to.setZero();
  jac.j_to.topLeftCorner<2, 2>() = a;
  jac.j_to(2, 2) = 1.0;
  return jac;
}

LoopJacobians loop_jacobians(const LoopEdge&, const std::vector<Pose2>&) {
  LoopJacobians jac;
  jac.j_i.setZero();
  jac.j_i.leftCols<2>() = Eigen::Matrix2d::Identity();
  jac.j_k.setZero();
  jac.j_k.leftCols<2>() = -Eigen::Matrix2d::Identity();
  return jac;
}

std::vector<double> loop_edge_weights(const PoseGraph& graph, double c) {
  std::vector<double> weights;
  weights.reserve(graph.loop_edges.size());
  for (const LoopEdge& e : graph.loop_edges) {
    const Eigen::Vector2d r = loop_residual(e, graph.nodes);
    weights.push_back(scaling_factor(r.dot(e.information * r), c));
  }
  return weights;
}

namespace {

// Robust objective: full quadratic cost on odometry, saturating robust
// cost on loops (plain quadratic when robust mode is off). Reweighted
// accepted steps never increase this value.
double objective(const PoseGraph& graph, const std::vector<Pose2>& nodes,
                 const SolverConfig& cfg) {
  double total = 0.0;
  for (const OdometryEdge& e : graph.odometry_edges) {
    const Eigen::Vector3d r = odometry_residual(e, nodes);
    total += r.dot(e.information * r);
  }
  for (const LoopEdge& e : graph.loop_edges) {
    const Eigen::Vector2d r = loop_residual(e, nodes);
    const double u = r.dot(e.information * r);
    total += cfg.robust_enabled ? robust_loop_cost(u, cfg.free_parameter_c) : u;
  }
  return total;
}

// Quadratic surrogate with frozen loop weights; the quantity the linear
// step actually reduces.
double frozen_cost(const PoseGraph& graph, const std::vector<Pose2>& nodes,
                   const std::vector<double>& loop_weights) {
  double total = 0.0;
  for (const OdometryEdge& e : graph.odometry_edges) {
    const Eigen::Vector3d r = odometry_residual(e, nodes);
    total += r.dot(e.information * r);
  }
  for (std::size_t i = 0; i < graph.loop_edges.size(); ++i) {
    const LoopEdge& e = graph.loop_edges[i];
    const Eigen::Vector2d r = loop_residual(e, nodes);
    const double s = loop_weights[i];
    total += s * s * r.dot(e.information * r);
  }
  return total;
}

}  // namespace

SolveResult optimize(const PoseGraph& graph, const SolverConfig& config) {
  config.validate();
  graph.validate();

  SolveResult result;
  result.graph = graph;
  std::vector<Pose2>& nodes = result.graph.nodes;
  SolveReport& report = result.report;

  const int n_free = static_cast<int>(nodes.size()) - 1;
  const int dim = 3 * n_free;
  const double c = config.free_parameter_c;

  double cost = objective(result.graph, nodes, config);
  if (!std::isfinite(cost)) {
    throw SolverError("non-finite objective at the initial estimate");
  }
  report.initial_cost = cost;
  report.cost_trace.push_back(cost);

  // Unknowns are nodes 1..N-1; node 0 stays anchored.
  const auto var_index = [](int node) { return 3 * (node - 1); };

  std::vector<double> weights(graph.loop_edges.size(), 1.0);
  double damping = std::max(config.initial_damping, 0.0);
  const double damping_floor = damping;
  bool converged = false;
  int iterations = 0;

  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs(dim);

  while (iterations < config.max_iterations && !converged && dim > 0) {
    ++iterations;

    // Freeze loop weights at the current estimate for this iteration.
    if (config.robust_enabled) {
      for (std::size_t i = 0; i < result.graph.loop_edges.size(); ++i) {
        const LoopEdge& e = result.graph.loop_edges[i];
        const Eigen::Vector2d r = loop_residual(e, nodes);
        weights[i] = scaling_factor(r.dot(e.information * r), c);
      }
    }

    triplets.clear();
    rhs.setZero();

    const auto add_block = [&](int row_node, int col_node,
                               const Eigen::Matrix3d& block) {
      if (row_node == 0 || col_node == 0) {
        return;
      }
      const int r0 = var_index(row_node);
      const int c0 = var_index(col_node);
      for (int r = 0; r < 3; ++r) {
        for (int cc = 0; cc < 3; ++cc) {
          triplets.emplace_back(r0 + r, c0 + cc, block(r, cc));
        }
      }
    };
    const auto add_rhs = [&](int node, const Eigen::Vector3d& v) {
      if (node == 0) {
        return;
      }
      rhs.segment<3>(var_index(node)) -= v;
    };

    for (const OdometryEdge& e : result.graph.odometry_edges) {
      const Eigen::Vector3d r = odometry_residual(e, nodes);
      const OdometryJacobians jac = odometry_jacobians(e, nodes);
      const Eigen::Matrix3d wa = e.information * jac.j_from;
      const Eigen::Matrix3d wb = e.information * jac.j_to;
      add_block(e.from_node, e.from_node, jac.j_from.transpose() * wa);
      add_block(e.from_node, e.to_node, jac.j_from.transpose() * wb);
      add_block(e.to_node, e.from_node, jac.j_to.transpose() * wa);
      add_block(e.to_node, e.to_node, jac.j_to.transpose() * wb);
      add_rhs(e.from_node, jac.j_from.transpose() * (e.information * r));
      add_rhs(e.to_node, jac.j_to.transpose() * (e.information * r));
    }
    for (std::size_t i = 0; i < result.graph.loop_edges.size(); ++i) {
      const LoopEdge& e = result.graph.loop_edges[i];
      const double w = weights[i] * weights[i];
      const Eigen::Vector2d r = loop_residual(e, nodes);
      const LoopJacobians jac = loop_jacobians(e, nodes);
      const Eigen::Matrix2d scaled = w * e.information;
      const Eigen::Matrix<double, 2, 3> wi = scaled * jac.j_i;
      const Eigen::Matrix<double, 2, 3> wk = scaled * jac.j_k;
      add_block(e.node_i, e.node_i, jac.j_i.transpose() * wi);
      add_block(e.node_i, e.node_k, jac.j_i.transpose() * wk);
      add_block(e.node_k, e.node_i, jac.j_k.transpose() * wi);
      add_block(e.node_k, e.node_k, jac.j_k.transpose() * wk);
      add_rhs(e.node_i, jac.j_i.transpose() * (scaled * r));
      add_rhs(e.node_k, jac.j_k.transpose() * (scaled * r));
    }

    const double current_frozen = frozen_cost(result.graph, nodes, weights);

    // Damping retries: inflate the diagonal until the factorization
    // succeeds and the step reduces the frozen surrogate.
    bool accepted = false;
    for (int attempt = 0; attempt < 30 && !accepted; ++attempt) {
      std::vector<Eigen::Triplet<double>> damped = triplets;
      for (int d = 0; d < dim; ++d) {
        damped.emplace_back(d, d, damping);
      }
      Eigen::SparseMatrix<double> h(dim, dim);
      h.setFromTriplets(damped.begin(), damped.end());

      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(h);
      if (ldlt.info() != Eigen::Success) {
        damping = std::max(damping, 1e-12) * 10.0;
        if (damping > 1e14) {
          throw SolverError(
              "normal equations singular after damping escalation; "
              "the graph is under-constrained");
        }
        continue;
      }
      const Eigen::VectorXd delta = ldlt.solve(rhs);
      if (!delta.allFinite()) {
        damping = std::max(damping, 1e-12) * 10.0;
        if (damping > 1e14) {
          throw SolverError("non-finite increment after damping escalation");
        }
        continue;
      }

      if (delta.norm() < config.step_tolerance) {
        converged = true;
        break;
      }

      std::vector<Pose2> trial = nodes;
      for (int node = 1; node <= n_free; ++node) {
        const int at = var_index(node);
        Pose2& p = trial[static_cast<std::size_t>(node)];
        p = Pose2{p.x + delta[at], p.y + delta[at + 1],
                  p.theta + delta[at + 2]};
      }

      const double trial_frozen = frozen_cost(result.graph, trial, weights);
      if (!std::isfinite(trial_frozen)) {
        throw SolverError("non-finite cost during optimization");
      }
      if (trial_frozen < current_frozen) {
        accepted = true;
        nodes = std::move(trial);
        damping = std::max(damping / 10.0, damping_floor);
      } else {
        damping = std::max(damping, 1e-12) * 10.0;
        if (damping > 1e14) {
          break;  // cannot improve further; stop without convergence
        }
      }
    }

    if (converged) {
      break;
    }
    if (!accepted) {
      break;  // damping exhausted
    }

    const double new_cost = objective(result.graph, nodes, config);
    if (!std::isfinite(new_cost)) {
      throw SolverError("non-finite cost during optimization");
    }
    report.cost_trace.push_back(new_cost);
    const double denom = std::max(std::abs(cost), 1e-300);
    if (std::abs(cost - new_cost) / denom < config.rel_cost_tolerance) {
      converged = true;
    }
    cost = new_cost;
  }

  if (dim == 0) {
    converged = true;  // nothing to optimize
  }

  report.iterations_used = iterations;
  report.converged = converged;
  report.final_cost = objective(result.graph, nodes, config);
  report.loop_scaling.assign(result.graph.loop_edges.size(), 1.0);
  if (config.robust_enabled) {
    report.loop_scaling = loop_edge_weights(result.graph, c);
  }
  return result;
}

}  // namespace rttslam
