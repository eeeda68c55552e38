#include "rttslam/pose_graph.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "rttslam/errors.hpp"
#include "rttslam/pdr.hpp"

namespace rttslam {

namespace {

constexpr double kSymmetryTol = 1e-12;

template <typename Mat>
void check_information(const Mat& m, const char* what) {
  if (!m.allFinite()) {
    throw InputError(std::string(what) + ": non-finite information matrix");
  }
  if (((m - m.transpose()).array().abs() > kSymmetryTol).any()) {
    throw InputError(std::string(what) + ": information matrix not symmetric");
  }
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) {
    throw InputError(std::string(what) +
                     ": information matrix not positive-definite");
  }
}

}  // namespace

void PoseGraph::validate() const {
  if (nodes.empty()) {
    throw InputError("pose graph has no nodes");
  }
  if (odometry_edges.size() + 1 != nodes.size()) {
    throw InputError("pose graph must have exactly one odometry edge "
                     "between consecutive nodes");
  }
  const int n = static_cast<int>(nodes.size());
  for (std::size_t i = 0; i < odometry_edges.size(); ++i) {
    const OdometryEdge& e = odometry_edges[i];
    if (e.from_node != static_cast<int>(i) || e.to_node != e.from_node + 1) {
      throw InputError("odometry edge " + std::to_string(i) +
                       ": must connect node " + std::to_string(i) + " to " +
                       std::to_string(i + 1));
    }
    check_information(e.information, "odometry edge");
  }
  for (const LoopEdge& e : loop_edges) {
    if (e.node_i < 0 || e.node_i >= n || e.node_k < 0 || e.node_k >= n) {
      throw InputError("loop edge references node outside the graph");
    }
    if (std::abs(e.node_i - e.node_k) < 2) {
      throw InputError("loop edge between identical or adjacent nodes");
    }
    check_information(e.information, "loop edge");
  }
}

Eigen::Matrix3d GraphNoiseModel::odometry_information(
    double step_length) const {
  const double sxy = odo_sigma_xy_per_m * step_length + odo_sigma_xy_base;
  Eigen::Matrix3d info = Eigen::Matrix3d::Zero();
  info(0, 0) = 1.0 / (sxy * sxy);
  info(1, 1) = 1.0 / (sxy * sxy);
  info(2, 2) = 1.0 / (odo_sigma_theta * odo_sigma_theta);
  return info;
}

Eigen::Matrix2d GraphNoiseModel::loop_information() const {
  return Eigen::Matrix2d::Identity() / (loop_sigma * loop_sigma);
}

namespace {

PoseGraph build_graph_impl(const std::vector<StepEvent>& steps,
                           const std::vector<NodeLoopPair>& loop_pairs,
                           const Eigen::Matrix3d* uniform_odo_info,
                           const Eigen::Matrix2d& loop_info,
                           const GraphNoiseModel* noise, const Pose2& origin) {
  const Trajectory initial = pdr_trajectory(steps, origin);

  PoseGraph graph;
  graph.nodes.reserve(initial.size());
  for (const TimedPose& tp : initial) {
    graph.nodes.push_back(tp.pose);
  }

  graph.odometry_edges.reserve(steps.size());
  for (std::size_t j = 0; j < steps.size(); ++j) {
    OdometryEdge e;
    e.from_node = static_cast<int>(j);
    e.to_node = static_cast<int>(j) + 1;
    e.measurement = between(graph.nodes[j], graph.nodes[j + 1]);
    e.information = uniform_odo_info
                        ? *uniform_odo_info
                        : noise->odometry_information(steps[j].length);
    graph.odometry_edges.push_back(e);
  }

  const int n = static_cast<int>(graph.nodes.size());
  graph.loop_edges.reserve(loop_pairs.size());
  for (const NodeLoopPair& p : loop_pairs) {
    if (p.node_i < 0 || p.node_i >= n || p.node_k < 0 || p.node_k >= n) {
      throw InputError("loop pair (" + std::to_string(p.node_i) + ", " +
                       std::to_string(p.node_k) + ") out of range");
    }
    if (std::abs(p.node_i - p.node_k) < 2) {
      throw InputError("loop pair (" + std::to_string(p.node_i) + ", " +
                       std::to_string(p.node_k) +
                       ") connects identical or adjacent nodes");
    }
    LoopEdge e;
    e.node_i = std::max(p.node_i, p.node_k);
    e.node_k = std::min(p.node_i, p.node_k);
    e.information = loop_info;
    e.rtt_distance = p.rtt_distance;
    graph.loop_edges.push_back(e);
  }

  graph.validate();
  return graph;
}

}  // namespace

PoseGraph build_graph(const std::vector<StepEvent>& steps,
                      const std::vector<NodeLoopPair>& loop_pairs,
                      const Eigen::Matrix3d& odo_info,
                      const Eigen::Matrix2d& loop_info, const Pose2& origin) {
  return build_graph_impl(steps, loop_pairs, &odo_info, loop_info, nullptr,
                          origin);
}

PoseGraph build_graph(const std::vector<StepEvent>& steps,
                      const std::vector<NodeLoopPair>& loop_pairs,
                      const GraphNoiseModel& noise, const Pose2& origin) {
  return build_graph_impl(steps, loop_pairs, nullptr, noise.loop_information(),
                          &noise, origin);
}

std::vector<NodeLoopPair> as_node_pairs(
    const std::vector<std::pair<int, int>>& pairs) {
  std::vector<NodeLoopPair> out;
  out.reserve(pairs.size());
  for (const auto& [i, k] : pairs) {
    out.push_back({std::max(i, k), std::min(i, k), 0.0});
  }
  return out;
}

Eigen::Vector3d odometry_residual(const OdometryEdge& edge,
                                  const std::vector<Pose2>& nodes) {
  const Pose2& from = nodes[static_cast<std::size_t>(edge.from_node)];
  const Pose2& to = nodes[static_cast<std::size_t>(edge.to_node)];
  // inverse(measurement) (+) between(from, to), written directly so the
  // residual is exactly zero when the realized motion equals the
  // measurement.
  const Pose2 delta = between(from, to);
  const double cz = std::cos(edge.measurement.theta);
  const double sz = std::sin(edge.measurement.theta);
  const double dx = delta.x - edge.measurement.x;
  const double dy = delta.y - edge.measurement.y;
  return {cz * dx + sz * dy, -sz * dx + cz * dy,
          angle_diff(delta.theta, edge.measurement.theta)};
}

Eigen::Vector2d loop_residual(const LoopEdge& edge,
                              const std::vector<Pose2>& nodes) {
  const Pose2& pi = nodes[static_cast<std::size_t>(edge.node_i)];
  const Pose2& pk = nodes[static_cast<std::size_t>(edge.node_k)];
  return {pi.x - pk.x, pi.y - pk.y};
}

Chi2 chi2(const PoseGraph& graph) {
  Chi2 out;
  for (const OdometryEdge& e : graph.odometry_edges) {
    const Eigen::Vector3d r = odometry_residual(e, graph.nodes);
    out.odometry += r.dot(e.information * r);
  }
  for (const LoopEdge& e : graph.loop_edges) {
    const Eigen::Vector2d r = loop_residual(e, graph.nodes);
    out.loops += r.dot(e.information * r);
  }
  return out;
}

void write_graph(std::ostream& os, const PoseGraph& graph) {
  os.precision(17);
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const Pose2& p = graph.nodes[i];
    os << "VERTEX_SE2 " << i << ' ' << p.x << ' ' << p.y << ' ' << p.theta
       << '\n';
  }
  for (const OdometryEdge& e : graph.odometry_edges) {
    const Eigen::Matrix3d& m = e.information;
    os << "EDGE_SE2 " << e.from_node << ' ' << e.to_node << ' '
       << e.measurement.x << ' ' << e.measurement.y << ' '
       << e.measurement.theta << ' ' << m(0, 0) << ' ' << m(0, 1) << ' '
       << m(0, 2) << ' ' << m(1, 1) << ' ' << m(1, 2) << ' ' << m(2, 2)
       << '\n';
  }
  for (const LoopEdge& e : graph.loop_edges) {
    const Eigen::Matrix2d& m = e.information;
    os << "EDGE_XY_VICINITY " << e.node_i << ' ' << e.node_k << ' ' << m(0, 0)
       << ' ' << m(0, 1) << ' ' << m(1, 1) << ' ' << e.rtt_distance << '\n';
  }
}

PoseGraph read_graph(std::istream& is) {
  PoseGraph graph;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "VERTEX_SE2") {
      int id = 0;
      double x = 0, y = 0, theta = 0;
      ss >> id >> x >> y >> theta;
      if (!ss || id != static_cast<int>(graph.nodes.size())) {
        throw InputError("graph line " + std::to_string(line_no) +
                         ": bad or out-of-order vertex");
      }
      graph.nodes.emplace_back(x, y, theta);
    } else if (tag == "EDGE_SE2") {
      OdometryEdge e;
      double x = 0, y = 0, theta = 0;
      double i11, i12, i13, i22, i23, i33;
      ss >> e.from_node >> e.to_node >> x >> y >> theta >> i11 >> i12 >> i13 >>
          i22 >> i23 >> i33;
      if (!ss) {
        throw InputError("graph line " + std::to_string(line_no) +
                         ": malformed EDGE_SE2");
      }
      e.measurement = Pose2{x, y, theta};
      e.information << i11, i12, i13, i12, i22, i23, i13, i23, i33;
      graph.odometry_edges.push_back(e);
    } else if (tag == "EDGE_XY_VICINITY") {
      LoopEdge e;
      double i11, i12, i22;
      ss >> e.node_i >> e.node_k >> i11 >> i12 >> i22 >> e.rtt_distance;
      if (!ss) {
        throw InputError("graph line " + std::to_string(line_no) +
                         ": malformed EDGE_XY_VICINITY");
      }
      e.information << i11, i12, i12, i22;
      graph.loop_edges.push_back(e);
    } else {
      throw InputError("graph line " + std::to_string(line_no) +
                       ": unknown record '" + tag + "'");
    }
  }
  graph.validate();
  return graph;
}

}  // namespace rttslam
