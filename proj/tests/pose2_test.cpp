#include "rttslam/pose2.hpp"

#include <cmath>
#include <doctest.h>

#include "test_support.hpp"

using namespace rttslam;

TEST_CASE("normalize_angle maps into (-pi, pi]") {
  CHECK(normalize_angle(0.0) == 0.0);
  CHECK(normalize_angle(3.0 * kPi) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(normalize_angle(-kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(2.0 * kPi) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normalize_angle(kPi) == kPi);
}

TEST_CASE("normalize_angle rejects non-finite input") {
  CHECK_THROWS_AS(normalize_angle(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(normalize_angle(INFINITY), std::invalid_argument);
}

TEST_CASE("normalize_angle is idempotent") {
  auto rng = testing::make_rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double a = testing::uniform(rng, -50.0, 50.0);
    const double once = normalize_angle(a);
    CHECK(normalize_angle(once) == once);
    CHECK(once > -kPi);
    CHECK(once <= kPi);
  }
}

TEST_CASE("compose identity and translations") {
  const Pose2 p{1.5, -2.0, 0.7};
  CHECK(approx_equal(compose(Pose2{}, p), p, 1e-15));
  CHECK(approx_equal(compose(Pose2{1, 0, 0}, Pose2{1, 0, 0}),
                     Pose2{2, 0, 0}, 1e-15));
}

TEST_CASE("compose rotates the second translation") {
  const Pose2 r = compose(Pose2{0, 0, kPi / 2}, Pose2{1, 0, 0});
  CHECK(r.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.y == doctest::Approx(1.0));
  CHECK(r.theta == doctest::Approx(kPi / 2));
}

TEST_CASE("inverse examples") {
  CHECK(approx_equal(inverse(Pose2{}), Pose2{}, 1e-15));
  CHECK(approx_equal(inverse(Pose2{3, 0, 0}), Pose2{-3, 0, 0}, 1e-15));
  CHECK(approx_equal(inverse(Pose2{0, 0, kPi / 2}), Pose2{0, 0, -kPi / 2},
                     1e-15));
}

TEST_CASE("compose(a, inverse(a)) is the identity within 1e-12") {
  auto rng = testing::make_rng(21);
  for (int i = 0; i < 1000; ++i) {
    const Pose2 a = testing::random_pose(rng);
    const Pose2 id = compose(a, inverse(a));
    CHECK(std::abs(id.x) < 1e-12);
    CHECK(std::abs(id.y) < 1e-12);
    CHECK(std::abs(angle_diff(id.theta, 0.0)) < 1e-12);
  }
}

TEST_CASE("compose is associative within 1e-9") {
  auto rng = testing::make_rng(42);
  for (int i = 0; i < 1000; ++i) {
    const Pose2 a = testing::random_pose(rng);
    const Pose2 b = testing::random_pose(rng);
    const Pose2 c = testing::random_pose(rng);
    CHECK(approx_equal(compose(compose(a, b), c), compose(a, compose(b, c)),
                       1e-9));
  }
}

TEST_CASE("compose/inverse round trip recovers the operand") {
  auto rng = testing::make_rng(99);
  for (int i = 0; i < 1000; ++i) {
    const Pose2 a = testing::random_pose(rng);
    const Pose2 b = testing::random_pose(rng);
    CHECK(approx_equal(compose(inverse(a), compose(a, b)), b, 1e-9));
  }
}

TEST_CASE("between composes to the target") {
  auto rng = testing::make_rng(123);
  for (int i = 0; i < 200; ++i) {
    const Pose2 a = testing::random_pose(rng);
    const Pose2 b = testing::random_pose(rng);
    CHECK(approx_equal(compose(a, between(a, b)), b, 1e-9));
  }
}
