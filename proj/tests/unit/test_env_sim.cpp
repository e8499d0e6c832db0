#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "irldrive/env_sim.hpp"
#include "irldrive/errors.hpp"
#include "irldrive/features.hpp"
#include "irldrive/synthetic.hpp"
#include "support/builders.hpp"

using namespace irldrive;
using test::lane_y;
using test::make_scene;
using test::plan_to;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

VehicleState car(double x, double y, double speed = 10.0, double length = 4.7) {
  VehicleState s;
  s.x = x;
  s.y = y;
  s.speed = speed;
  s.length = length;
  s.width = 1.8;
  return s;
}

bool overridden(const RolloutResult& r, long id) {
  for (const auto& e : r.override_events) {
    if (e.vehicle_id == id) return true;
  }
  return false;
}

int first_override(const RolloutResult& r, long id) {
  for (const auto& e : r.override_events) {
    if (e.vehicle_id == id) return e.step;
  }
  return -1;
}

}  // namespace

TEST_CASE("IDM reference values") {
  const auto p = IDMParams::training_environment();
  CHECK(idm_acceleration(10, 0, kInf, p) == doctest::Approx(0.0));
  CHECK(idm_acceleration(0, 0, kInf, p) == doctest::Approx(p.a_max));
  CHECK(idm_acceleration(0, 0, 1e6, p) == doctest::Approx(p.a_max));
  CHECK(idm_desired_gap(10, 0, p) == doctest::Approx(11.0));
  CHECK(idm_acceleration(10, 0, 11.0, p) == doctest::Approx(-5.0));
  CHECK(idm_acceleration(10, 5, 0.5, p) == doctest::Approx(-9.0));
  // Faster leader: the dynamic part of s* is floored at zero.
  CHECK(idm_desired_gap(1, -50, p) == doctest::Approx(p.s0));
}

TEST_CASE("bicycle step") {
  SUBCASE("straight at constant speed") {
    const auto n = bicycle_step(car(0, 2, 10), 0, 0, 0.1, 2.8);
    CHECK(n.x == doctest::Approx(1.0));
    CHECK(n.y == doctest::Approx(2.0));
    CHECK(n.heading == 0.0);
    CHECK(n.speed == 10.0);
  }
  SUBCASE("standing still only integrates acceleration") {
    const auto n = bicycle_step(car(5, 2, 0), 0.4, 2.0, 0.1, 2.8);
    CHECK(n.x == 5.0);
    CHECK(n.y == 2.0);
    CHECK(n.heading == 0.0);
    CHECK(n.speed == doctest::Approx(0.2));
  }
  SUBCASE("heading rate follows the steering angle") {
    const auto n = bicycle_step(car(0, 0, 10), 0.1, 0, 0.1, 2.8);
    CHECK(n.heading == doctest::Approx(10 / 2.8 * std::tan(0.1) * 0.1));
  }
  SUBCASE("speed never goes negative") {
    CHECK(bicycle_step(car(0, 0, 0.3), 0, -9, 0.1, 2.8).speed == 0.0);
  }
}

TEST_CASE("collision check") {
  CHECK(collision_check(car(10, 5), car(10, 5)));
  CHECK_FALSE(collision_check(car(10, 5), car(40, 5)));
  CHECK(collision_check(car(10, 5, 10, 4.9), car(14.5, 5, 10, 4.9)));
  CHECK_FALSE(collision_check(car(10, 5, 10, 4.9), car(14.95, 5, 10, 4.9)));
  CHECK_FALSE(collision_check(car(10, 5), car(10, 5 + 3.66)));
  auto turned = car(10, 7.2);
  turned.heading = 0.9;
  CHECK(collision_check(car(10, 5), turned));
}

TEST_CASE("curb collision") {
  const RoadModel road;
  CHECK_FALSE(curb_collision(car(100, lane_y(1)), road));
  CHECK(curb_collision(car(100, 0.5), road));
  CHECK_FALSE(curb_collision(car(100, lane_y(5)), road));
  // The right strip is paved everywhere on this section.
  CHECK_FALSE(curb_collision(car(300, road.lane_center(6)), road));
  CHECK(curb_collision(car(300, 6 * road.lane_width + 0.2), road));
}

TEST_CASE("pure pursuit on a straight reference") {
  const auto scene = make_scene(100, lane_y(3), 10);
  const auto ref = plan_to(scene, 10, lane_y(3));
  const ControllerParams params;
  const auto on = pure_pursuit_step(car(100, lane_y(3)), ref, 0.0, params, 2.82);
  CHECK(std::abs(on.steer) < 1e-12);
  CHECK(std::abs(on.accel) < 1e-9);

  // Offset toward +y steers back with a negative angle, and vice versa.
  const auto plus = pure_pursuit_step(car(100, lane_y(3) + 0.5), ref, 0.0,
                                      params, 2.82);
  CHECK(plus.steer < 0.0);
  const auto minus = pure_pursuit_step(car(100, lane_y(3) - 0.5), ref, 0.0,
                                       params, 2.82);
  CHECK(minus.steer > 0.0);
  CHECK(std::abs(plus.steer) <= params.max_steer);

  const auto slow = pure_pursuit_step(car(100, lane_y(3), 5), ref, 0.0, params,
                                      2.82);
  CHECK(slow.accel > 0.0);
  CHECK(slow.accel <= params.max_accel);
}

TEST_CASE("closed-loop lane change ends within 0.3 m laterally") {
  const RoadModel road;
  for (double v : {5.0, 10.0, 15.0, 20.0, 28.0}) {
    for (int target : {1, 3}) {
      const auto scene = make_scene(50, lane_y(2), v);
      const auto ref = plan_to(scene, v, lane_y(target));
      const auto r = rollout(scene, ref, EnvMode::kReactiveReplay, road);
      REQUIRE(r.ego_states.size() == 51);
      CHECK(std::abs(r.ego_states.back().y - lane_y(target)) < 0.3);
    }
  }
}

TEST_CASE("empty road straight plan") {
  const auto scene = make_scene(100, lane_y(3), 10);
  const auto ref = plan_to(scene, 13, lane_y(3));
  const auto r = rollout(scene, ref, EnvMode::kReactiveReplay, RoadModel{});
  CHECK(r.override_events.empty());
  CHECK_FALSE(r.collision.occurred());
  CHECK(r.ego_states.back().speed == doctest::Approx(13).epsilon(0.03));
  CHECK(std::abs(r.ego_states.back().x - ref.points.back().x) < 1.0);
}

TEST_CASE("cut-in makes the new follower yield") {
  const RoadModel road;
  // Ego in lane 2 moves into lane 3, 10 m ahead of a 10 m/s follower.
  const auto scene = make_scene(
      110, lane_y(2), 10, {test::constant_track(7, 100, lane_y(3), 10)});
  const auto ref = plan_to(scene, 10, lane_y(3));
  const auto r = rollout(scene, ref, EnvMode::kReactiveReplay, road);
  CHECK(overridden(r, 7));
  bool decel = false;
  for (const auto& step : r.influenced_decels) {
    auto it = step.find(7);
    if (it != step.end() && it->second < 0) decel = true;
  }
  CHECK(decel);
  CHECK_FALSE(r.collision.occurred());
  CHECK(r.neighbor_states.at(7).back().x < 100 + 50 - 1.0);

  const auto f = trajectory_features(r, ref, road.lane_width);
  CHECK(f[kInteraction] > 0.0);
}

TEST_CASE("braking ego triggers chained overrides") {
  const RoadModel road;
  const auto scene = make_scene(
      100, lane_y(3), 10,
      {test::constant_track(1, 85, lane_y(3), 10),
       test::constant_track(2, 65, lane_y(3), 10)});
  const auto ref = plan_to(scene, 2, lane_y(3));
  const auto r = rollout(scene, ref, EnvMode::kReactiveReplay, road);
  const int first = first_override(r, 1);
  const int second = first_override(r, 2);
  CHECK(first >= 1);
  CHECK(second > first);
  CHECK_FALSE(r.collision.occurred());
}

TEST_CASE("collision is latched and freezes the other vehicle") {
  const RoadModel road;
  const auto scene = make_scene(
      100, lane_y(3), 10, {test::constant_track(4, 130, lane_y(3), 0)});
  const auto ref = plan_to(scene, 10, lane_y(3));
  const auto r = rollout(scene, ref, EnvMode::kReactiveReplay, road);
  REQUIRE(r.collision.occurred());
  CHECK(r.collision.kind == Collision::Kind::kVehicle);
  CHECK(r.collision.vehicle_id == 4);
  const int k = r.collision.step;
  CHECK(k > 0);
  CHECK(r.collision.active_at(50));
  CHECK_FALSE(r.collision.active_at(k - 1));
  const auto f = trajectory_features(r, ref, road.lane_width);
  CHECK(f[kCollision] == doctest::Approx(51 - k));
  const auto& other = r.neighbor_states.at(4);
  for (int j = k; j <= 50; ++j) CHECK(other[j].x == other[k].x);
}

TEST_CASE("fixed replay reproduces the logs exactly") {
  const auto scenes = synthetic_scenes(5, 21);
  const RoadModel road;
  for (const auto& scene : scenes) {
    for (const auto& c : generate_candidates(scene, road)) {
      const auto r = rollout(scene, c, EnvMode::kFixedReplay, road);
      CHECK(r.override_events.empty());
      for (const auto& [id, states] : r.neighbor_states) {
        const auto& log = scene.neighbor_tracks.at(id);
        for (int k = 0; k <= 50; ++k) {
          const long frame = scene.start_frame + k;
          if (!log.covers(frame) || r.collision.occurred()) continue;
          CHECK(states[k].x == log.at_frame(frame).x);
          CHECK(states[k].y == log.at_frame(frame).y);
        }
      }
      CHECK(trajectory_features(r, c, road.lane_width)[kInteraction] == 0.0);
    }
  }
}

TEST_CASE("rollout invariants over synthetic scenes") {
  const auto scenes = synthetic_scenes(6, 8);
  const RoadModel road;
  for (const auto& scene : scenes) {
    for (const auto& c : generate_candidates(scene, road)) {
      const auto r = rollout(scene, c, EnvMode::kReactiveReplay, road);
      // No teleporting.
      for (int k = 1; k <= 50; ++k) {
        const auto& a = r.ego_states[k - 1];
        const auto& b = r.ego_states[k];
        CHECK(std::hypot(b.x - a.x, b.y - a.y) <= 40 * 0.1 + 1e-9);
      }
      for (const auto& [id, states] : r.neighbor_states) {
        for (int k = 1; k <= 50; ++k) {
          if (!states[k - 1].active || !states[k].active) continue;
          CHECK(std::hypot(states[k].x - states[k - 1].x,
                           states[k].y - states[k - 1].y) <= 40 * 0.1 + 1e-9);
        }
        // Override is permanent.
        bool seen = false;
        for (int k = 0; k <= 50; ++k) {
          if (states[k].mode == VehicleMode::kIdmOverride) seen = true;
          if (seen) CHECK(states[k].mode == VehicleMode::kIdmOverride);
        }
      }
      // Only overridden vehicles report reaction accelerations.
      for (int k = 0; k <= 50; ++k) {
        for (const auto& [id, a] : r.influenced_decels[k]) {
          CHECK(r.neighbor_states.at(id)[k].mode == VehicleMode::kIdmOverride);
        }
      }
      // Determinism.
      const auto again = rollout(scene, c, EnvMode::kReactiveReplay, road);
      REQUIRE(again.ego_states.size() == r.ego_states.size());
      for (std::size_t k = 0; k < r.ego_states.size(); ++k) {
        CHECK(again.ego_states[k].x == r.ego_states[k].x);
        CHECK(again.ego_states[k].y == r.ego_states[k].y);
      }
      CHECK(again.influenced_decels == r.influenced_decels);
      CHECK(again.override_events.size() == r.override_events.size());
    }
  }
}

TEST_CASE("overridden followers do not rear-end a gently braking leader") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  const RoadModel road;
  const auto idm = IDMParams::training_environment();
  int overrides = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double v_ego = 6 + 10 * u(rng);
    const double v_end = std::max(0.0, v_ego - 5 * u(rng));
    const double v_f = std::max(1.0, v_ego + (5 * u(rng) - 2));
    const double s_star = idm_desired_gap(v_f, v_f - v_ego, idm);
    const double gap = s_star + 10 * u(rng);
    const double x_f = 200 - gap - 4.7;
    const auto scene = make_scene(
        200, lane_y(3), v_ego, {test::constant_track(1, x_f, lane_y(3), v_f)});
    const auto ref = plan_to(scene, v_end, lane_y(3));
    const auto r = rollout(scene, ref, EnvMode::kReactiveReplay, road);
    if (overridden(r, 1)) ++overrides;
    CHECK_FALSE(r.collision.occurred());
  }
  CHECK(overrides > 20);
}

TEST_CASE("forecast mode drives neighbors without their logs") {
  const RoadModel road;
  // The log swerves into lane 4 but the forecast never reads it.
  auto weave = test::track_from(
      3, test::kStartFrame, 51, [](double t) { return 140 + 10 * t; },
      [](double t) { return lane_y(3) + (t > 1.0 ? 3.66 : 0.0); });
  const auto scene = make_scene(100, lane_y(3), 10, {weave});
  const auto ref = plan_to(scene, 10, lane_y(3));
  const auto r = rollout(scene, ref, EnvMode::kForecast, road);
  const auto& states = r.neighbor_states.at(3);
  for (int k = 0; k <= 50; ++k) {
    CHECK(states[k].y == doctest::Approx(lane_y(3)));
  }
  CHECK(states.back().x == doctest::Approx(190).epsilon(0.01));

  const auto replay = rollout(scene, ref, EnvMode::kReactiveReplay, road);
  CHECK(replay.neighbor_states.at(3).back().y ==
        doctest::Approx(lane_y(4)).epsilon(1e-3));
}

TEST_CASE("forecast mode needs neighbor states at the first frame") {
  const auto late = test::constant_track(5, 140, lane_y(3), 10, 40,
                                         test::kStartFrame + 11);
  const auto scene = make_scene(100, lane_y(3), 10, {late});
  const auto ref = plan_to(scene, 10, lane_y(3));
  CHECK_THROWS_AS(rollout(scene, ref, EnvMode::kForecast, RoadModel{}),
                  ConfigError);
  CHECK_NOTHROW(rollout(scene, ref, EnvMode::kReactiveReplay, RoadModel{}));
}

TEST_CASE("vehicles past the end of the road leave the interaction") {
  const RoadModel road;
  // Stopped vehicle logged beyond the downstream boundary.
  const auto scene = make_scene(
      600, lane_y(3), 10, {test::constant_track(9, 645, lane_y(3), 0)});
  const auto ref = plan_to(scene, 10, lane_y(3));
  const auto r = rollout(scene, ref, EnvMode::kReactiveReplay, road);
  CHECK_FALSE(r.collision.occurred());
  CHECK_FALSE(r.neighbor_states.at(9).back().active);
}

TEST_CASE("environment mode names round trip") {
  for (auto m : {EnvMode::kReactiveReplay, EnvMode::kFixedReplay,
                 EnvMode::kForecast}) {
    CHECK(env_mode_from_string(to_string(m)) == m);
  }
  CHECK_THROWS_AS(env_mode_from_string("replay"), ConfigError);
}
