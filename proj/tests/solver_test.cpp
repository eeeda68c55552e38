#include "rttslam/solver.hpp"

#include <cmath>
#include <cstring>
#include <doctest.h>

#include "rttslam/errors.hpp"
#include "rttslam/metrics.hpp"
#include "test_support.hpp"

using namespace rttslam;

namespace {

std::vector<StepEvent> make_steps(const std::vector<double>& lengths,
                                  const std::vector<double>& headings) {
  std::vector<StepEvent> steps;
  for (std::size_t j = 0; j < lengths.size(); ++j) {
    steps.push_back({static_cast<int>(j), 0.5 * static_cast<double>(j),
                     0.5 * static_cast<double>(j + 1), lengths[j],
                     headings[j]});
  }
  return steps;
}

bool bitwise_equal(const std::vector<Pose2>& a, const std::vector<Pose2>& b) {
  if (a.size() != b.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::memcmp(&a[i], &b[i], sizeof(Pose2)) != 0) {
      return false;
    }
  }
  return true;
}

// Two laps around a circle: true revisits pair node j with j + per_lap;
// diametrically opposed nodes sit 2 * radius apart for false pairs.
struct CircleScenario {
  PoseGraph graph;
  Trajectory ground_truth;
};

CircleScenario circle_scenario(int per_lap, double radius,
                               double drift_per_step, double noise_sigma,
                               std::uint64_t seed, int true_loops,
                               int false_loops) {
  const int n_steps = 2 * per_lap;
  const double arc = 2.0 * kPi / per_lap;
  const double step_len = 2.0 * radius * std::sin(arc / 2.0);

  std::vector<double> true_lengths, true_headings;
  Trajectory gt;
  gt.push_back({0.0, Pose2{radius, 0.0, kPi / 2 + arc / 2}});
  for (int j = 1; j <= n_steps; ++j) {
    const double ang = arc * j;
    const Pose2 p{radius * std::cos(ang), radius * std::sin(ang),
                  normalize_angle(kPi / 2 + arc * (j - 0.5))};
    gt.push_back({0.5 * j, p});
    true_lengths.push_back(step_len);
    true_headings.push_back(p.theta);
  }

  auto rng = testing::make_rng(seed);
  std::vector<double> lengths = true_lengths, headings = true_headings;
  for (int j = 0; j < n_steps; ++j) {
    lengths[static_cast<std::size_t>(j)] +=
        testing::uniform(rng, -noise_sigma, noise_sigma);
    headings[static_cast<std::size_t>(j)] = normalize_angle(
        headings[static_cast<std::size_t>(j)] +
        testing::uniform(rng, -noise_sigma, noise_sigma) +
        drift_per_step * (j + 1));
  }

  std::vector<NodeLoopPair> pairs;
  for (int m = 0; m < true_loops; ++m) {
    const int k = (m * per_lap) / true_loops;
    pairs.push_back({k + per_lap, k, 0.0});
  }
  for (int m = 0; m < false_loops; ++m) {
    const int k = 3 + (m * per_lap) / false_loops;
    pairs.push_back({k + per_lap / 2, k, 0.0});  // opposite side, ~2R apart
  }

  CircleScenario out;
  out.graph = build_graph(make_steps(lengths, headings), pairs,
                          GraphNoiseModel{}, gt.front().pose);
  out.ground_truth = gt;
  return out;
}

double rmse_vs(const std::vector<Pose2>& nodes, const Trajectory& gt) {
  Trajectory est;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    est.push_back({gt[i].t, nodes[i]});
  }
  return rmse(per_point_errors(est, gt));
}

}  // namespace

TEST_CASE("scaling_factor closed-form values") {
  const double c = 1.7;
  CHECK(scaling_factor(0.0, c) == 1.0);
  CHECK(scaling_factor(c, c) == 1.0);
  CHECK(scaling_factor(3.0 * c, c) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(scaling_factor(-0.1, c), std::invalid_argument);
  CHECK_THROWS_AS(scaling_factor(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(scaling_factor(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("scaling_factor is monotone non-increasing and in (0, 1]") {
  const double c = 0.8;
  double last = 2.0;
  for (int i = 0; i < 1000; ++i) {
    const double u = 0.05 * i;
    const double s = scaling_factor(u, c);
    CHECK(s > 0.0);
    CHECK(s <= 1.0);
    CHECK(s <= last);
    last = s;
  }
}

TEST_CASE("scaling_factor is invariant under joint scaling") {
  auto rng = testing::make_rng(3);
  for (int i = 0; i < 500; ++i) {
    const double c = testing::uniform(rng, 0.05, 10.0);
    const double u = testing::uniform(rng, 0.0, 50.0);
    const double lambda = testing::uniform(rng, 0.01, 100.0);
    CHECK(std::abs(scaling_factor(u, c) -
                   scaling_factor(lambda * u, lambda * c)) < 1e-12);
  }
}

TEST_CASE("robust_loop_cost is continuous, monotone, and saturates") {
  const double c = 1.3;
  CHECK(robust_loop_cost(0.0, c) == 0.0);
  CHECK(robust_loop_cost(c, c) == doctest::Approx(c));
  CHECK(robust_loop_cost(c * 1.0000001, c) == doctest::Approx(c));
  double last = -1.0;
  for (int i = 0; i < 1000; ++i) {
    const double u = 0.1 * i;
    const double v = robust_loop_cost(u, c);
    CHECK(v >= last);
    CHECK(v <= 3.0 * c);
    last = v;
  }
}

TEST_CASE("optimize leaves a consistent graph at its fixed point") {
  auto rng = testing::make_rng(500);
  std::vector<double> lengths, headings;
  for (int j = 0; j < 25; ++j) {
    lengths.push_back(testing::uniform(rng, 0.3, 1.0));
    headings.push_back(testing::uniform(rng, -kPi, kPi));
  }
  const PoseGraph g =
      build_graph(make_steps(lengths, headings), {}, GraphNoiseModel{});
  const std::vector<Pose2> before = g.nodes;

  const SolveResult res = optimize(g, SolverConfig{});
  CHECK(res.report.converged);
  CHECK(res.report.final_cost == doctest::Approx(0.0).epsilon(1e-18));
  CHECK(res.report.iterations_used <= 1);
  CHECK(bitwise_equal(res.graph.nodes, before));
}

TEST_CASE("optimize recovers a perturbed odometry chain") {
  auto rng = testing::make_rng(600);
  std::vector<double> lengths, headings;
  for (int j = 0; j < 30; ++j) {
    lengths.push_back(testing::uniform(rng, 0.3, 1.0));
    headings.push_back(testing::uniform(rng, -2.0, 2.0));
  }
  PoseGraph g =
      build_graph(make_steps(lengths, headings), {}, GraphNoiseModel{});

  // Closed-form solution: sequential composition of the measurements.
  std::vector<Pose2> expected{g.nodes[0]};
  for (const OdometryEdge& e : g.odometry_edges) {
    expected.push_back(compose(expected.back(), e.measurement));
  }

  for (std::size_t i = 1; i < g.nodes.size(); ++i) {
    g.nodes[i] = Pose2{g.nodes[i].x + testing::uniform(rng, -0.3, 0.3),
                       g.nodes[i].y + testing::uniform(rng, -0.3, 0.3),
                       g.nodes[i].theta + testing::uniform(rng, -0.15, 0.15)};
  }

  const SolveResult res = optimize(g, SolverConfig{});
  CHECK(res.report.converged);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(std::abs(res.graph.nodes[i].x - expected[i].x) < 1e-6);
    CHECK(std::abs(res.graph.nodes[i].y - expected[i].y) < 1e-6);
    CHECK(std::abs(angle_diff(res.graph.nodes[i].theta, expected[i].theta)) <
          1e-6);
  }
}

TEST_CASE("analytic Jacobians match central finite differences") {
  auto rng = testing::make_rng(700);
  const double h = 1e-6;
  int checked = 0;
  while (checked < 100) {
    const Pose2 from = testing::random_pose(rng);
    const Pose2 to = testing::random_pose(rng);
    OdometryEdge e;
    e.from_node = 0;
    e.to_node = 1;
    e.measurement = testing::random_pose(rng, 1.5);
    std::vector<Pose2> nodes{from, to};
    if (std::abs(odometry_residual(e, nodes)[2]) > 3.0) {
      continue;  // keep clear of the angle-wrap discontinuity
    }
    ++checked;

    const OdometryJacobians jac = odometry_jacobians(e, nodes);
    for (int node = 0; node < 2; ++node) {
      for (int coord = 0; coord < 3; ++coord) {
        auto perturbed = [&](double delta) {
          std::vector<Pose2> n2 = nodes;
          Pose2& p = n2[static_cast<std::size_t>(node)];
          double v[3] = {p.x, p.y, p.theta};
          v[coord] += delta;
          p.x = v[0];
          p.y = v[1];
          p.theta = v[2];
          return odometry_residual(e, n2);
        };
        const Eigen::Vector3d fd = (perturbed(h) - perturbed(-h)) / (2.0 * h);
        const Eigen::Matrix3d& j = node == 0 ? jac.j_from : jac.j_to;
        for (int row = 0; row < 3; ++row) {
          const double analytic = j(row, coord);
          const double denom = std::max(1.0, std::abs(analytic));
          CHECK(std::abs(fd[row] - analytic) / denom < 1e-5);
        }
      }
    }

    LoopEdge le;
    le.node_i = 1;
    le.node_k = 0;
    const LoopJacobians lj = loop_jacobians(le, nodes);
    for (int node = 0; node < 2; ++node) {
      for (int coord = 0; coord < 3; ++coord) {
        auto perturbed = [&](double delta) {
          std::vector<Pose2> n2 = nodes;
          Pose2& p = n2[static_cast<std::size_t>(node)];
          double v[3] = {p.x, p.y, p.theta};
          v[coord] += delta;
          p.x = v[0];
          p.y = v[1];
          p.theta = v[2];
          return loop_residual(le, n2);
        };
        const Eigen::Vector2d fd = (perturbed(h) - perturbed(-h)) / (2.0 * h);
        const auto& j = node == 1 ? lj.j_i : lj.j_k;
        for (int row = 0; row < 2; ++row) {
          CHECK(std::abs(fd[row] - j(row, coord)) < 1e-5);
        }
      }
    }
  }
}

TEST_CASE("robust and traditional runs are bitwise identical without loops") {
  auto rng = testing::make_rng(900);
  std::vector<double> lengths, headings;
  for (int j = 0; j < 20; ++j) {
    lengths.push_back(0.7);
    headings.push_back(testing::uniform(rng, -kPi, kPi));
  }
  PoseGraph g =
      build_graph(make_steps(lengths, headings), {}, GraphNoiseModel{});
  for (std::size_t i = 1; i < g.nodes.size(); ++i) {
    g.nodes[i] = Pose2{g.nodes[i].x + testing::uniform(rng, -0.2, 0.2),
                       g.nodes[i].y + testing::uniform(rng, -0.2, 0.2),
                       g.nodes[i].theta + testing::uniform(rng, -0.1, 0.1)};
  }
  SolverConfig robust;
  robust.robust_enabled = true;
  SolverConfig traditional;
  traditional.robust_enabled = false;
  const SolveResult a = optimize(g, robust);
  const SolveResult b = optimize(g, traditional);
  CHECK(bitwise_equal(a.graph.nodes, b.graph.nodes));
}

TEST_CASE("node 0 stays bitwise anchored") {
  const CircleScenario sc = circle_scenario(100, 16.0, 0.004, 0.01, 42, 10, 5);
  const Pose2 anchor = sc.graph.nodes[0];
  const SolveResult res = optimize(sc.graph, SolverConfig{});
  CHECK(std::memcmp(&res.graph.nodes[0], &anchor, sizeof(Pose2)) == 0);
}

TEST_CASE("accepted iterations never increase the robust objective") {
  const CircleScenario sc = circle_scenario(100, 16.0, 0.004, 0.01, 42, 10, 5);
  const SolveResult res = optimize(sc.graph, SolverConfig{});
  const auto& trace = res.report.cost_trace;
  REQUIRE(trace.size() >= 2);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    CHECK(trace[i] <= trace[i - 1] * (1.0 + 1e-12) + 1e-12);
  }
  CHECK(res.report.final_cost <= res.report.initial_cost);
}

TEST_CASE("robust mode absorbs false loops that break the traditional run") {
  // Two laps, drift, ten true revisit edges and five false edges between
  // diametrically opposed nodes (2 * 16 m > 20 m apart in truth).
  const CircleScenario sc = circle_scenario(100, 16.0, 0.001, 0.01, 42, 10, 5);

  SolverConfig robust;
  robust.robust_enabled = true;
  SolverConfig traditional;
  traditional.robust_enabled = false;

  const SolveResult r = optimize(sc.graph, robust);
  const SolveResult t = optimize(sc.graph, traditional);

  const double rmse_initial = rmse_vs(sc.graph.nodes, sc.ground_truth);
  const double rmse_robust = rmse_vs(r.graph.nodes, sc.ground_truth);
  const double rmse_traditional = rmse_vs(t.graph.nodes, sc.ground_truth);

  CHECK(rmse_initial > 0.5);  // drift is visible before optimization
  CHECK(rmse_robust < 0.3);
  CHECK(rmse_traditional > 1.5);

  // False edges end up strongly down-weighted, true edges keep weight.
  REQUIRE(r.report.loop_scaling.size() == 15);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(r.report.loop_scaling[i] > 0.5);
  }
  for (std::size_t i = 10; i < 15; ++i) {
    CHECK(r.report.loop_scaling[i] < 0.05);
  }
}

TEST_CASE("loop_edge_weights evaluates the current scaling factors") {
  std::vector<double> lengths(6, 1.0), headings(6, 0.0);
  PoseGraph g = build_graph(make_steps(lengths, headings),
                            {{4, 0, 0.0}, {5, 1, 0.0}, {6, 2, 0.0}},
                            GraphNoiseModel{});
  // Collapse the chain so every paired node coincides, then move one.
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    g.nodes[i] = Pose2{0.0, 0.0, 0.0};
  }
  g.nodes[5] = Pose2{std::sqrt(3.0), 0.0, 0.0};  // chi2 = 3 with sigma 1

  const std::vector<double> w = loop_edge_weights(g, 1.0);
  REQUIRE(w.size() == 3);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w[2] == 1.0);

  double last = 1.0;
  for (double u : {0.0, 1.0, 2.0, 4.0, 8.0}) {
    const double s = scaling_factor(u, 1.0);
    CHECK(s <= last);
    last = s;
  }
}

TEST_CASE("optimize reports failure on a non-finite start") {
  std::vector<double> lengths(4, 1.0), headings(4, 0.0);
  PoseGraph g =
      build_graph(make_steps(lengths, headings), {}, GraphNoiseModel{});
  g.nodes[2] = Pose2{1e200, 0.0, 0.0};
  CHECK_THROWS_AS(optimize(g, SolverConfig{}), SolverError);
}

TEST_CASE("optimize validates the graph and configuration") {
  std::vector<double> lengths(4, 1.0), headings(4, 0.0);
  const PoseGraph g =
      build_graph(make_steps(lengths, headings), {}, GraphNoiseModel{});
  SolverConfig bad;
  bad.free_parameter_c = 0.0;
  CHECK_THROWS_AS(optimize(g, bad), ConfigError);

  PoseGraph broken = g;
  broken.odometry_edges.pop_back();
  CHECK_THROWS_AS(optimize(broken, SolverConfig{}), InputError);
}
