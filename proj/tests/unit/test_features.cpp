#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "irldrive/env_sim.hpp"
#include "irldrive/errors.hpp"
#include "irldrive/features.hpp"
#include "irldrive/synthetic.hpp"
#include "support/builders.hpp"

using namespace irldrive;
using test::lane_y;

namespace {

constexpr double kLane = 3.66;

VehicleState at(double x, double y, double speed) {
  VehicleState s;
  s.x = x;
  s.y = y;
  s.speed = speed;
  return s;
}

// Rollout of `steps + 1` identical frames with the ego at (100, lane 3).
RolloutResult frozen_world(double ego_speed, std::vector<VehicleState> others,
                           int steps = 50) {
  RolloutResult r;
  r.ego_states.assign(steps + 1, at(100, lane_y(3), ego_speed));
  long id = 1;
  for (const auto& o : others) r.neighbor_states[id++].assign(steps + 1, o);
  r.influenced_decels.assign(steps + 1, {});
  return r;
}

CandidateTrajectory straight_plan(double v) {
  const auto scene = test::make_scene(100, lane_y(3), v);
  return test::plan_to(scene, v, lane_y(3));
}

}  // namespace

TEST_CASE("feature names are stable") {
  const auto& n = feature_names();
  CHECK(n[kSpeed] == "speed");
  CHECK(n[kCollision] == "collision");
  CHECK(n[kInteraction] == "interaction");
}

TEST_CASE("empty surroundings leave risk and interaction at zero") {
  auto scene = test::make_scene(100, lane_y(3), 10);
  scene.ego_init.ax = 0.8;
  const auto plan = test::plan_to(scene, 12, lane_y(2));
  const auto r = rollout(scene, plan, EnvMode::kReactiveReplay, RoadModel{});
  const auto f = step_features(r, plan, 0, kLane);
  CHECK(f[kSpeed] == doctest::Approx(10));
  CHECK(f[kAccelX] == doctest::Approx(0.8));
  CHECK(f[kAccelY] == doctest::Approx(std::abs(plan.points[0].ay)));
  CHECK(f[kJerkX] == doctest::Approx(std::abs(plan.points[0].jx)));
  CHECK(f[kFrontRisk] == 0.0);
  CHECK(f[kRearRisk] == 0.0);
  CHECK(f[kCollision] == 0.0);
  CHECK(f[kInteraction] == 0.0);
}

TEST_CASE("front risk is the exponential of negative time headway") {
  const auto r = frozen_world(10, {at(120, lane_y(3), 10)});
  const auto f = step_features(r, straight_plan(10), 0, kLane);
  CHECK(f[kFrontRisk] == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(f[kFrontRisk] == doctest::Approx(0.13534).epsilon(1e-4));
  CHECK(f[kRearRisk] == 0.0);
}

TEST_CASE("rear risk uses the follower speed") {
  const auto r = frozen_world(10, {at(85, lane_y(3), 5)});
  const auto f = step_features(r, straight_plan(10), 0, kLane);
  CHECK(f[kRearRisk] == doctest::Approx(std::exp(-3.0)));
  CHECK(f[kFrontRisk] == 0.0);
}

TEST_CASE("low speeds are clamped in the headway") {
  const auto r = frozen_world(0, {at(100.5, lane_y(3), 0)});
  const auto f = step_features(r, straight_plan(10), 0, kLane);
  CHECK(f[kFrontRisk] == doctest::Approx(std::exp(-5.0)));
}

TEST_CASE("vehicles outside half a lane width do not count") {
  const auto r = frozen_world(10, {at(120, lane_y(3) + 1.9, 10),
                                   at(80, lane_y(3) - 1.9, 10)});
  const auto f = step_features(r, straight_plan(10), 0, kLane);
  CHECK(f[kFrontRisk] == 0.0);
  CHECK(f[kRearRisk] == 0.0);
}

TEST_CASE("risk decreases strictly with the gap") {
  double prev_front = 2, prev_rear = 2;
  for (double gap = 5; gap <= 60; gap += 2.5) {
    const auto r = frozen_world(
        12, {at(100 + gap, lane_y(3), 8), at(100 - gap, lane_y(3), 9)});
    const auto f = step_features(r, straight_plan(12), 0, kLane);
    CHECK(f[kFrontRisk] < prev_front);
    CHECK(f[kRearRisk] < prev_rear);
    prev_front = f[kFrontRisk];
    prev_rear = f[kRearRisk];
  }
}

TEST_CASE("only decelerations count toward interaction") {
  auto r = frozen_world(10, {at(80, lane_y(3), 10), at(60, lane_y(3), 10)});
  r.influenced_decels[4] = {{1, -2.0}, {2, 0.5}};
  const auto plan = straight_plan(10);
  CHECK(step_features(r, plan, 4, kLane)[kInteraction] == doctest::Approx(2.0));
  CHECK(step_features(r, plan, 5, kLane)[kInteraction] == 0.0);
}

TEST_CASE("constant speed straight driving accumulates 51 speed samples") {
  const auto scene = test::make_scene(100, lane_y(3), 10);
  const auto plan = test::plan_to(scene, 10, lane_y(3));
  const auto r = rollout(scene, plan, EnvMode::kReactiveReplay, RoadModel{});
  const auto f = trajectory_features(r, plan, kLane);
  CHECK(f[kSpeed] == doctest::Approx(510));
  CHECK(std::abs(f[kAccelX]) < 1e-9);
  CHECK(std::abs(f[kAccelY]) < 1e-9);
  CHECK(std::abs(f[kJerkX]) < 1e-9);
}

TEST_CASE("latched collision from step 30 adds 21") {
  auto r = frozen_world(10, {});
  r.collision = {Collision::Kind::kCurb, 0, 30, 3.0};
  const auto f = trajectory_features(r, straight_plan(10), kLane);
  CHECK(f[kCollision] == 21.0);
}

TEST_CASE("parked ego in an empty world has all-zero features") {
  const auto scene = test::make_scene(100, lane_y(3), 0);
  const auto plan = test::plan_to(scene, 0, lane_y(3));
  const auto r = rollout(scene, plan, EnvMode::kReactiveReplay, RoadModel{});
  for (double v : trajectory_features(r, plan, kLane)) CHECK(v == 0.0);
}

TEST_CASE("all raw features are non-negative on synthetic scenes") {
  const RoadModel road;
  for (const auto& scene : synthetic_scenes(4, 12)) {
    for (const auto& c : generate_candidates(scene, road)) {
      const auto r = rollout(scene, c, EnvMode::kReactiveReplay, road);
      for (double v : trajectory_features(r, c, road.lane_width)) {
        CHECK(v >= 0.0);
      }
    }
  }
}

TEST_CASE("normalization") {
  SUBCASE("single row maps its nonzero features to one") {
    const std::vector<FeatureVector> buf{{3, 0, 2, 0, 0.5, 0, 0, 7}};
    const auto c = fit_normalization(buf);
    const auto n = normalize(buf[0], c);
    CHECK(n[0] == 1.0);
    CHECK(n[2] == 1.0);
    CHECK(n[4] == 1.0);
    CHECK(n[7] == 1.0);
    CHECK(n[1] == 0.0);
    CHECK(c.divisors[1] == 1.0);
  }
  SUBCASE("speed 300 and 600") {
    const std::vector<FeatureVector> buf{{300, 1, 1, 1, 1, 1, 0, 0},
                                         {600, 1, 1, 1, 1, 1, 0, 0}};
    const auto c = fit_normalization(buf);
    CHECK(normalize(buf[0], c)[0] == 0.5);
    CHECK(normalize(buf[1], c)[0] == 1.0);
    CHECK(c.divisors[6] == 1.0);
  }
  SUBCASE("empty buffer is a configuration error") {
    CHECK_THROWS_AS(fit_normalization(std::span<const FeatureVector>{}),
                    ConfigError);
  }
  SUBCASE("idempotent, order independent and bounded") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 100);
    std::vector<FeatureVector> buf(40);
    for (auto& row : buf) {
      for (auto& v : row) v = u(rng);
    }
    const auto c = fit_normalization(buf);
    std::vector<FeatureVector> normed;
    for (const auto& row : buf) {
      normed.push_back(normalize(row, c));
      for (double v : normed.back()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
    const auto again = fit_normalization(normed);
    for (double d : again.divisors) CHECK(d == 1.0);
    auto shuffled = buf;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(fit_normalization(shuffled).id() == c.id());
  }
  SUBCASE("id changes with the divisors") {
    NormalizationConstants a, b;
    b.divisors[3] = 2.0;
    CHECK(a.id() != b.id());
    CHECK(a.id().size() == 16);
  }
}
