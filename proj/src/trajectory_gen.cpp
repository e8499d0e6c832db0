#include "irldrive/trajectory_gen.hpp"

#include <algorithm>
#include <cmath>

#include "irldrive/errors.hpp"

namespace irldrive {
namespace {

void require_positive_horizon(double T) {
  if (!(T > 0.0)) {
    throw DomainError("polynomial horizon must be positive, got " +
                      std::to_string(T));
  }
}

}  // namespace

Quartic solve_longitudinal(double x_s, double v_xs, double a_xs, double v_xe,
                           double a_xe, double T) {
  require_positive_horizon(T);
  Quartic p;
  p.c[0] = x_s;
  p.c[1] = v_xs;
  p.c[2] = 0.5 * a_xs;
  // Remaining unknowns c3, c4 from the two end conditions.
  const double dv = v_xe - v_xs - a_xs * T;
  const double da = a_xe - a_xs;
  p.c[3] = (3.0 * dv - T * da) / (3.0 * T * T);
  p.c[4] = (T * da - 2.0 * dv) / (4.0 * T * T * T);
  return p;
}

Quintic solve_lateral(double y_s, double v_ys, double a_ys, double y_e,
                      double v_ye, double a_ye, double T) {
  require_positive_horizon(T);
  Quintic p;
  p.c[0] = y_s;
  p.c[1] = v_ys;
  p.c[2] = 0.5 * a_ys;
  const double T2 = T * T;
  const double T3 = T2 * T;
  const double dy = y_e - (y_s + v_ys * T + 0.5 * a_ys * T2);
  const double dv = v_ye - (v_ys + a_ys * T);
  const double da = a_ye - a_ys;
  p.c[3] = (10.0 * dy - 4.0 * dv * T + 0.5 * da * T2) / T3;
  p.c[4] = (-15.0 * dy + 7.0 * dv * T - da * T2) / (T3 * T);
  p.c[5] = (6.0 * dy - 3.0 * dv * T + 0.5 * da * T2) / (T3 * T2);
  return p;
}

CandidateTrajectory sample_polynomials(const PolynomialPair& poly, double dt,
                                       int steps, TrajectorySource source,
                                       std::optional<TargetState> target) {
  CandidateTrajectory out;
  out.source = source;
  out.target = target;
  out.polynomials = poly;
  out.points.reserve(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    const double t = k * dt;
    TrajectoryPoint p;
    p.t = t;
    p.x = poly.longitudinal.value(t);
    p.vx = poly.longitudinal.derivative(t, 1);
    p.ax = poly.longitudinal.derivative(t, 2);
    p.jx = poly.longitudinal.derivative(t, 3);
    p.y = poly.lateral.value(t);
    p.vy = poly.lateral.derivative(t, 1);
    p.ay = poly.lateral.derivative(t, 2);
    out.points.push_back(p);
  }
  return out;
}

std::vector<TargetState> sample_targets(const TrackState& ego_init,
                                        const RoadModel& road,
                                        const SamplingSpace& space) {
  const int half_steps =
      static_cast<int>(std::lround(space.speed_half_range / space.speed_step));
  std::vector<double> speeds;
  for (int k = -half_steps; k <= half_steps; ++k) {
    speeds.push_back(std::max(0.0, ego_init.vx + k * space.speed_step));
  }
  speeds.erase(std::unique(speeds.begin(), speeds.end()), speeds.end());

  int lane = ego_init.lane_id;
  if (auto geometric = road.lane_at(ego_init.x, ego_init.y)) {
    lane = *geometric;
  }
  std::vector<double> laterals{ego_init.y};
  if (lane >= 1) {
    if (auto left = road.left_neighbor(lane)) {
      laterals.push_back(road.lane_center(*left));
    }
    if (auto right = road.right_neighbor(lane)) {
      laterals.push_back(road.lane_center(*right));
    }
  }

  std::vector<TargetState> targets;
  targets.reserve(speeds.size() * laterals.size());
  for (double ye : laterals) {
    for (double v : speeds) {
      TargetState target;
      target.vxe = v;
      target.ye = ye;
      targets.push_back(target);
    }
  }
  return targets;
}

std::vector<CandidateTrajectory> generate_candidates(
    const Scene& scene, const RoadModel& road, const SamplingSpace& space) {
  const auto& s = scene.ego_init;
  std::vector<CandidateTrajectory> out;
  for (const auto& target : sample_targets(s, road, space)) {
    PolynomialPair poly;
    poly.horizon = scene.horizon;
    poly.longitudinal = solve_longitudinal(s.x, s.vx, s.ax, target.vxe,
                                           target.axe, scene.horizon);
    poly.lateral = solve_lateral(s.y, s.vy, s.ay, target.ye, target.vye,
                                 target.aye, scene.horizon);
    out.push_back(sample_polynomials(poly, scene.dt, scene.steps(),
                                     TrajectorySource::kGenerated, target));
  }
  return out;
}

}  // namespace irldrive
