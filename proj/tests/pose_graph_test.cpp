#include "rttslam/pose_graph.hpp"

#include <array>
#include <cmath>
#include <doctest.h>
#include <sstream>

#include "rttslam/errors.hpp"
#include "test_support.hpp"

using namespace rttslam;

namespace {

std::vector<StepEvent> make_steps(int count, double length = 1.0,
                                  double heading = 0.0) {
  std::vector<StepEvent> steps;
  for (int j = 0; j < count; ++j) {
    steps.push_back({j, 0.5 * j, 0.5 * (j + 1), length, heading});
  }
  return steps;
}

// Hand-rolled SE(2) arithmetic on (x, y, theta) triples, used as an
// independent oracle for residual checks.
using Triple = std::array<double, 3>;

Triple se2_mul(const Triple& a, const Triple& b) {
  const double c = std::cos(a[2]), s = std::sin(a[2]);
  return {a[0] + c * b[0] - s * b[1], a[1] + s * b[0] + c * b[1],
          std::remainder(a[2] + b[2], 2.0 * kPi)};
}

Triple se2_inv(const Triple& a) {
  const double c = std::cos(a[2]), s = std::sin(a[2]);
  return {-c * a[0] - s * a[1], s * a[0] - c * a[1],
          std::remainder(-a[2], 2.0 * kPi)};
}

Eigen::Matrix3d random_spd3(std::mt19937_64& rng) {
  Eigen::Matrix3d a;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      a(r, c) = testing::uniform(rng, -1.0, 1.0);
    }
  }
  return a.transpose() * a + 3.0 * Eigen::Matrix3d::Identity();
}

}  // namespace

TEST_CASE("build_graph counts nodes and edges") {
  const PoseGraph g = build_graph(make_steps(3), {}, GraphNoiseModel{});
  CHECK(g.nodes.size() == 4);
  CHECK(g.odometry_edges.size() == 3);
  CHECK(g.loop_edges.empty());
}

TEST_CASE("build_graph rejects adjacent loop pairs") {
  CHECK_THROWS_AS(
      build_graph(make_steps(3), {{1, 0, 0.0}}, GraphNoiseModel{}),
      InputError);
  CHECK_THROWS_AS(
      build_graph(make_steps(3), {{9, 0, 0.0}}, GraphNoiseModel{}),
      InputError);
}

TEST_CASE("build_graph accepts a closing loop pair") {
  const PoseGraph g =
      build_graph(make_steps(6), {{5, 0, 0.3}}, GraphNoiseModel{});
  REQUIRE(g.loop_edges.size() == 1);
  CHECK(g.loop_edges[0].node_i == 5);
  CHECK(g.loop_edges[0].node_k == 0);
  CHECK(g.loop_edges[0].rtt_distance == 0.3);
}

TEST_CASE("odometry measurements reproduce the dead-reckoned chain") {
  auto rng = testing::make_rng(11);
  std::vector<StepEvent> steps;
  for (int j = 0; j < 12; ++j) {
    steps.push_back({j, 0.5 * j, 0.5 * (j + 1),
                     testing::uniform(rng, 0.2, 1.0),
                     testing::uniform(rng, -kPi, kPi)});
  }
  const PoseGraph g = build_graph(steps, {}, GraphNoiseModel{});
  for (const OdometryEdge& e : g.odometry_edges) {
    const Eigen::Vector3d r = odometry_residual(e, g.nodes);
    CHECK(r.norm() < 1e-12);
  }
}

TEST_CASE("odometry_residual matches the hand-composed oracle") {
  SUBCASE("pure forward mismatch") {
    OdometryEdge e;
    e.from_node = 0;
    e.to_node = 1;
    e.measurement = Pose2{1, 0, 0};
    const std::vector<Pose2> nodes{Pose2{}, Pose2{2, 0, 0}};
    const Eigen::Vector3d r = odometry_residual(e, nodes);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(0.0));
    CHECK(r[2] == doctest::Approx(0.0));
  }
  SUBCASE("pure heading mismatch") {
    OdometryEdge e;
    e.from_node = 0;
    e.to_node = 1;
    e.measurement = Pose2{1, 0, 0};
    const std::vector<Pose2> nodes{Pose2{}, Pose2{1, 0, kPi / 4}};
    const Eigen::Vector3d r = odometry_residual(e, nodes);
    CHECK(std::abs(r[0]) < 1e-15);
    CHECK(std::abs(r[1]) < 1e-15);
    CHECK(r[2] == doctest::Approx(kPi / 4));
  }
  SUBCASE("randomized against se2 triple arithmetic") {
    auto rng = testing::make_rng(313);
    for (int trial = 0; trial < 200; ++trial) {
      const Pose2 from = testing::random_pose(rng);
      const Pose2 to = testing::random_pose(rng);
      const Pose2 z = testing::random_pose(rng, 1.0);
      OdometryEdge e;
      e.from_node = 0;
      e.to_node = 1;
      e.measurement = z;
      const std::vector<Pose2> nodes{from, to};
      const Eigen::Vector3d r = odometry_residual(e, nodes);

      const Triple expected = se2_mul(
          se2_inv({z.x, z.y, z.theta}),
          se2_mul(se2_inv({from.x, from.y, from.theta}),
                  {to.x, to.y, to.theta}));
      CHECK(r[0] == doctest::Approx(expected[0]).epsilon(1e-9));
      CHECK(r[1] == doctest::Approx(expected[1]).epsilon(1e-9));
      CHECK(std::abs(std::remainder(r[2] - expected[2], 2.0 * kPi)) < 1e-9);
    }
  }
}

TEST_CASE("loop_residual is the position difference and ignores heading") {
  LoopEdge e;
  e.node_i = 2;
  e.node_k = 0;
  SUBCASE("coincident") {
    const std::vector<Pose2> nodes{Pose2{1, 1, 0}, Pose2{}, Pose2{1, 1, 2.0}};
    CHECK(loop_residual(e, nodes).norm() == 0.0);
  }
  SUBCASE("offset") {
    const std::vector<Pose2> nodes{Pose2{0, 0, 0}, Pose2{}, Pose2{3, 4, 1.0}};
    const Eigen::Vector2d r = loop_residual(e, nodes);
    CHECK(r[0] == 3.0);
    CHECK(r[1] == 4.0);
  }
  SUBCASE("heading-only difference") {
    const std::vector<Pose2> nodes{Pose2{2, 2, -1.0}, Pose2{},
                                   Pose2{2, 2, 2.5}};
    CHECK(loop_residual(e, nodes).norm() == 0.0);
  }
}

TEST_CASE("chi2 on a consistent graph is zero") {
  const Chi2 c = chi2(build_graph(make_steps(5), {}, GraphNoiseModel{}));
  CHECK(c.odometry == doctest::Approx(0.0).epsilon(1e-18));
  CHECK(c.loops == 0.0);
}

TEST_CASE("chi2 of a unit residual under identity information is one") {
  PoseGraph g;
  g.nodes = {Pose2{}, Pose2{2, 0, 0}};
  OdometryEdge e;
  e.from_node = 0;
  e.to_node = 1;
  e.measurement = Pose2{1, 0, 0};
  e.information = Eigen::Matrix3d::Identity();
  g.odometry_edges.push_back(e);
  CHECK(chi2(g).odometry == doctest::Approx(1.0));
}

TEST_CASE("chi2 matches a naive term-by-term evaluation") {
  auto rng = testing::make_rng(404);
  std::vector<StepEvent> steps;
  for (int j = 0; j < 15; ++j) {
    steps.push_back({j, 0.5 * j, 0.5 * (j + 1),
                     testing::uniform(rng, 0.2, 1.0),
                     testing::uniform(rng, -kPi, kPi)});
  }
  PoseGraph g = build_graph(steps, {{10, 2, 0.0}, {14, 5, 0.0}},
                            GraphNoiseModel{});
  for (auto& e : g.odometry_edges) {
    e.information = random_spd3(rng);
  }
  for (Pose2& p : g.nodes) {
    p = Pose2{p.x + testing::uniform(rng, -0.5, 0.5),
              p.y + testing::uniform(rng, -0.5, 0.5),
              p.theta + testing::uniform(rng, -0.5, 0.5)};
  }

  // Independent evaluation with scalar loops.
  double odo = 0.0;
  for (const OdometryEdge& e : g.odometry_edges) {
    const Eigen::Vector3d r = odometry_residual(e, g.nodes);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        odo += r[a] * e.information(a, b) * r[b];
      }
    }
  }
  double loops = 0.0;
  for (const LoopEdge& e : g.loop_edges) {
    const Eigen::Vector2d r = loop_residual(e, g.nodes);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        loops += r[a] * e.information(a, b) * r[b];
      }
    }
  }
  const Chi2 c = chi2(g);
  CHECK(c.odometry == doctest::Approx(odo).epsilon(1e-12));
  CHECK(c.loops == doctest::Approx(loops).epsilon(1e-12));
  CHECK(c.odometry >= 0.0);
  CHECK(c.loops >= 0.0);
}

TEST_CASE("rigid transformation preserves residuals") {
  auto rng = testing::make_rng(555);
  std::vector<StepEvent> steps;
  for (int j = 0; j < 10; ++j) {
    steps.push_back({j, 0.5 * j, 0.5 * (j + 1),
                     testing::uniform(rng, 0.2, 1.0),
                     testing::uniform(rng, -kPi, kPi)});
  }
  PoseGraph g = build_graph(steps, {{8, 1, 0.0}}, GraphNoiseModel{});
  for (Pose2& p : g.nodes) {
    p = Pose2{p.x + testing::uniform(rng, -0.3, 0.3),
              p.y + testing::uniform(rng, -0.3, 0.3),
              p.theta + testing::uniform(rng, -0.3, 0.3)};
  }
  const Pose2 t = testing::random_pose(rng);

  PoseGraph moved = g;
  for (Pose2& p : moved.nodes) {
    p = compose(t, p);
  }
  for (std::size_t i = 0; i < g.odometry_edges.size(); ++i) {
    const Eigen::Vector3d before =
        odometry_residual(g.odometry_edges[i], g.nodes);
    const Eigen::Vector3d after =
        odometry_residual(moved.odometry_edges[i], moved.nodes);
    CHECK((before - after).norm() < 1e-9);
  }
  for (std::size_t i = 0; i < g.loop_edges.size(); ++i) {
    const double before = loop_residual(g.loop_edges[i], g.nodes).norm();
    const double after =
        loop_residual(moved.loop_edges[i], moved.nodes).norm();
    CHECK(before == doctest::Approx(after).epsilon(1e-9));
  }
}

TEST_CASE("graph serialization round-trips") {
  auto rng = testing::make_rng(808);
  std::vector<StepEvent> steps;
  for (int j = 0; j < 6; ++j) {
    steps.push_back({j, 0.5 * j, 0.5 * (j + 1),
                     testing::uniform(rng, 0.2, 1.0),
                     testing::uniform(rng, -kPi, kPi)});
  }
  const PoseGraph g =
      build_graph(steps, {{5, 0, 0.37}, {4, 1, 1.21}}, GraphNoiseModel{});

  std::stringstream ss;
  write_graph(ss, g);
  const PoseGraph back = read_graph(ss);

  REQUIRE(back.nodes.size() == g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    CHECK(back.nodes[i].x == g.nodes[i].x);
    CHECK(back.nodes[i].y == g.nodes[i].y);
    CHECK(back.nodes[i].theta == g.nodes[i].theta);
  }
  REQUIRE(back.odometry_edges.size() == g.odometry_edges.size());
  for (std::size_t i = 0; i < g.odometry_edges.size(); ++i) {
    CHECK(back.odometry_edges[i].measurement.x ==
          g.odometry_edges[i].measurement.x);
    CHECK((back.odometry_edges[i].information -
           g.odometry_edges[i].information).norm() == 0.0);
  }
  REQUIRE(back.loop_edges.size() == g.loop_edges.size());
  for (std::size_t i = 0; i < g.loop_edges.size(); ++i) {
    CHECK(back.loop_edges[i].node_i == g.loop_edges[i].node_i);
    CHECK(back.loop_edges[i].node_k == g.loop_edges[i].node_k);
    CHECK(back.loop_edges[i].rtt_distance == g.loop_edges[i].rtt_distance);
    CHECK((back.loop_edges[i].information - g.loop_edges[i].information)
              .norm() == 0.0);
  }
}

TEST_CASE("read_graph reports malformed records with line numbers") {
  std::stringstream ss("VERTEX_SE2 0 0 0 0\nEDGE_SE2 0 1 broken\n");
  bool threw = false;
  try {
    read_graph(ss);
  } catch (const InputError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("pose graph validation rejects non-positive-definite information") {
  PoseGraph g;
  g.nodes = {Pose2{}, Pose2{1, 0, 0}};
  OdometryEdge e;
  e.from_node = 0;
  e.to_node = 1;
  e.measurement = Pose2{1, 0, 0};
  e.information = Eigen::Matrix3d::Zero();
  g.odometry_edges.push_back(e);
  CHECK_THROWS_AS(g.validate(), InputError);
}
