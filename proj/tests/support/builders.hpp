#pragma once

// Small scene and trajectory builders shared by the unit, CLI and acceptance
// tests.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "irldrive/env_sim.hpp"
#include "irldrive/road_model.hpp"
#include "irldrive/scene.hpp"
#include "irldrive/trajectory_gen.hpp"

namespace irldrive::test {

inline constexpr long kStartFrame = 1000;

// Track sampled from x(t), y(t) on frames first..first+samples-1, with
// velocities from central differences of the given functions.
inline VehicleTrack track_from(long id, long first_frame, int samples,
                               const std::function<double(double)>& x,
                               const std::function<double(double)>& y,
                               double length = 4.7, double width = 1.8) {
  VehicleTrack t;
  t.vehicle_id = id;
  t.first_frame = first_frame;
  t.length = length;
  t.width = width;
  const RoadModel road;
  constexpr double h = 1e-4;
  for (int k = 0; k < samples; ++k) {
    const double tk = k * kFrameDt;
    TrackState s;
    s.x = x(tk);
    s.y = y(tk);
    s.vx = (x(tk + h) - x(tk - h)) / (2 * h);
    s.vy = (y(tk + h) - y(tk - h)) / (2 * h);
    s.lane_id = road.lane_at(s.x, s.y).value_or(0);
    t.states.push_back(s);
  }
  return t;
}

inline VehicleTrack constant_track(long id, double x0, double y0, double v,
                                   int samples = 51,
                                   long first_frame = kStartFrame) {
  return track_from(
      id, first_frame, samples, [=](double t) { return x0 + v * t; },
      [=](double) { return y0; });
}

// Scene whose ego starts at (x0, y0) with speed v; the recorded ego keeps
// constant velocity.
inline Scene make_scene(double x0, double y0, double v,
                        std::vector<VehicleTrack> neighbors = {},
                        const std::string& id = "scene") {
  Scene s;
  s.scene_id = id;
  s.ego_id = 0;
  s.start_frame = kStartFrame;
  s.ego_ground_truth = constant_track(0, x0, y0, v);
  s.ego_init = s.ego_ground_truth.states.front();
  for (auto& n : neighbors) s.neighbor_tracks.emplace(n.vehicle_id, n);
  return s;
}

// Plan from the scene's initial state to the given end speed and lateral
// position (zero end accelerations).
inline CandidateTrajectory plan_to(const Scene& scene, double v_end,
                                   double y_end) {
  const auto& s = scene.ego_init;
  PolynomialPair poly;
  poly.horizon = scene.horizon;
  poly.longitudinal = solve_longitudinal(s.x, s.vx, s.ax, v_end, 0.0,
                                         scene.horizon);
  poly.lateral = solve_lateral(s.y, s.vy, s.ay, y_end, 0.0, 0.0, scene.horizon);
  TargetState target{v_end, 0.0, y_end, 0.0, 0.0};
  return sample_polynomials(poly, scene.dt, scene.steps(),
                            TrajectorySource::kGenerated, target);
}

inline double lane_y(int lane) { return RoadModel{}.lane_center(lane); }

}  // namespace irldrive::test
