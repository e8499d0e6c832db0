#include "irldrive/env_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "irldrive/errors.hpp"
#include "irldrive/mobil.hpp"

namespace irldrive {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinAccel = -9.0;
constexpr double kStandstill = 0.1;

double wrap_angle(double a) {
  while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a < -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

struct ReferenceSample {
  double x, y, vx, vy;
};

// Reference state at time tau; past the end the last state is extended
// along its velocity.
ReferenceSample reference_at(const CandidateTrajectory& ref, double tau) {
  tau = std::max(tau, 0.0);
  const double end = ref.horizon();
  if (tau > end) {
    const auto last = reference_at(ref, end);
    const double dt = tau - end;
    return {last.x + last.vx * dt, last.y + last.vy * dt, last.vx, last.vy};
  }
  if (ref.polynomials) {
    const auto& p = *ref.polynomials;
    return {p.longitudinal.value(tau), p.lateral.value(tau),
            p.longitudinal.derivative(tau, 1), p.lateral.derivative(tau, 1)};
  }
  const double dt = ref.dt();
  const auto last = ref.points.size() - 1;
  const auto i = std::min<std::size_t>(
      static_cast<std::size_t>(std::floor(tau / dt)), last);
  if (i == last) {
    const auto& p = ref.points[last];
    return {p.x, p.y, p.vx, p.vy};
  }
  const auto& a = ref.points[i];
  const auto& b = ref.points[i + 1];
  const double w = (tau - a.t) / (b.t - a.t);
  auto lerp = [w](double u, double v) { return u + w * (v - u); };
  return {lerp(a.x, b.x), lerp(a.y, b.y), lerp(a.vx, b.vx), lerp(a.vy, b.vy)};
}

VehicleState from_log(const TrackState& s, double length, double width) {
  VehicleState v;
  v.x = s.x;
  v.y = s.y;
  v.speed = std::hypot(s.vx, s.vy);
  v.heading = v.speed > kStandstill ? std::atan2(s.vy, s.vx) : 0.0;
  v.accel = s.ax;
  v.length = length;
  v.width = width;
  v.mode = VehicleMode::kReplay;
  return v;
}

// Longitudinal IDM step with lateral position held.
void advance_longitudinal(VehicleState& v, double accel, double dt) {
  v.accel = accel;
  const double next_speed = v.speed + accel * dt;
  if (next_speed < 0.0) {
    v.x += accel < 0.0 ? -v.speed * v.speed / (2.0 * accel) : 0.0;
    v.speed = 0.0;
  } else {
    v.x += v.speed * dt + 0.5 * accel * dt * dt;
    v.speed = next_speed;
  }
}

struct Agent {
  long id = 0;
  const VehicleTrack* log = nullptr;
  VehicleState state;
  double v0 = 0.0;
  bool frozen = false;
  std::optional<Quintic> lateral_plan;
};

}  // namespace

double idm_desired_gap(double v, double dv, const IDMParams& p) {
  const double dynamic = v * p.tau + v * dv / (2.0 * std::sqrt(p.a_max * p.b));
  return p.s0 + std::max(0.0, dynamic);
}

double idm_acceleration(double v, double dv, double gap, const IDMParams& p) {
  if (gap <= 0.0) return kMinAccel;
  const double v0 = std::max(p.v0, 1e-3);
  const double free_term = std::pow(v / v0, p.delta);
  double interaction = 0.0;
  if (std::isfinite(gap)) {
    const double ratio = idm_desired_gap(v, dv, p) / gap;
    interaction = ratio * ratio;
  }
  const double a = p.a_max * (1.0 - free_term - interaction);
  return std::clamp(a, kMinAccel, p.a_max);
}

ControlCommand pure_pursuit_step(const VehicleState& state,
                                 const CandidateTrajectory& reference,
                                 double t, const ControllerParams& params,
                                 double wheelbase) {
  constexpr double kSearchStep = 0.01;
  auto distance_to = [&](const ReferenceSample& r) {
    return std::hypot(r.x - state.x, r.y - state.y);
  };

  // Closest reference time near t, then march forward to the lookahead.
  double tau_near = t;
  double best = kInf;
  for (double tau = std::max(0.0, t - 1.0); tau <= t + 2.0; tau += kSearchStep) {
    const double d = distance_to(reference_at(reference, tau));
    if (d < best) {
      best = d;
      tau_near = tau;
    }
  }
  const double lookahead =
      std::max(params.min_lookahead, params.lookahead_time * state.speed);
  double tau_la = tau_near;
  auto target = reference_at(reference, tau_la);
  while (distance_to(target) < lookahead && tau_la < tau_near + 5.0) {
    tau_la += kSearchStep;
    target = reference_at(reference, tau_la);
  }

  ControlCommand cmd;
  const double dx = target.x - state.x;
  const double dy = target.y - state.y;
  const double ld = std::hypot(dx, dy);
  if (ld > 1e-9) {
    const double alpha = wrap_angle(std::atan2(dy, dx) - state.heading);
    cmd.steer = std::atan2(2.0 * wheelbase * std::sin(alpha), ld);
  }
  cmd.steer = std::clamp(cmd.steer, -params.max_steer, params.max_steer);

  const double v_ref = std::hypot(target.vx, target.vy);
  const double horizon = std::max(tau_la - tau_near, 0.1);
  cmd.accel = std::clamp((v_ref - state.speed) / horizon, params.min_accel,
                         params.max_accel);
  return cmd;
}

VehicleState bicycle_step(const VehicleState& state, double steer,
                          double accel, double dt, double wheelbase) {
  VehicleState next = state;
  next.x += state.speed * std::cos(state.heading) * dt;
  next.y += state.speed * std::sin(state.heading) * dt;
  next.heading = wrap_angle(state.heading +
                            state.speed / wheelbase * std::tan(steer) * dt);
  next.speed = std::max(0.0, state.speed + accel * dt);
  next.accel = accel;
  return next;
}

namespace {

std::array<Point2, 4> corners(const VehicleState& s) {
  const double c = std::cos(s.heading);
  const double sn = std::sin(s.heading);
  const double hl = 0.5 * s.length;
  const double hw = 0.5 * s.width;
  std::array<Point2, 4> out;
  int i = 0;
  for (double fl : {hl, -hl}) {
    for (double fw : {hw, -hw}) {
      out[i++] = {s.x + fl * c - fw * sn, s.y + fl * sn + fw * c};
    }
  }
  return out;
}

}  // namespace

bool collision_check(const VehicleState& a, const VehicleState& b) {
  const auto ca = corners(a);
  const auto cb = corners(b);
  const std::array<Point2, 4> axes{
      Point2{std::cos(a.heading), std::sin(a.heading)},
      Point2{-std::sin(a.heading), std::cos(a.heading)},
      Point2{std::cos(b.heading), std::sin(b.heading)},
      Point2{-std::sin(b.heading), std::cos(b.heading)}};
  for (const auto& axis : axes) {
    double min_a = kInf, max_a = -kInf, min_b = kInf, max_b = -kInf;
    for (const auto& p : ca) {
      const double d = p.x * axis.x + p.y * axis.y;
      min_a = std::min(min_a, d);
      max_a = std::max(max_a, d);
    }
    for (const auto& p : cb) {
      const double d = p.x * axis.x + p.y * axis.y;
      min_b = std::min(min_b, d);
      max_b = std::max(max_b, d);
    }
    if (!(max_a > min_b && max_b > min_a)) return false;
  }
  return true;
}

bool curb_collision(const VehicleState& state, const RoadModel& road) {
  for (const auto& p : corners(state)) {
    if (p.y < road.left_edge(p.x) || p.y > road.right_edge(p.x)) return true;
  }
  return false;
}

std::string to_string(EnvMode mode) {
  switch (mode) {
    case EnvMode::kReactiveReplay:
      return "reactive_replay";
    case EnvMode::kFixedReplay:
      return "fixed_replay";
    case EnvMode::kForecast:
      return "forecast";
  }
  return "unknown";
}

EnvMode env_mode_from_string(const std::string& text) {
  if (text == "reactive_replay") return EnvMode::kReactiveReplay;
  if (text == "fixed_replay") return EnvMode::kFixedReplay;
  if (text == "forecast") return EnvMode::kForecast;
  throw ConfigError("unknown environment mode '" + text + "'");
}

double wheelbase_for(double length, const SimConfig& config) {
  return config.wheelbase_ratio * length;
}

double bumper_gap(const VehicleState& rear, const VehicleState& front) {
  return front.x - rear.x - 0.5 * (front.length + rear.length);
}

std::optional<std::size_t> nearest_in_lane(
    const std::vector<VehicleState>& world, std::size_t self,
    double lane_width, bool ahead) {
  const auto& me = world[self];
  std::optional<std::size_t> best;
  double best_dx = kInf;
  for (std::size_t i = 0; i < world.size(); ++i) {
    const auto& o = world[i];
    if (i == self || !o.active) continue;
    if (std::abs(o.y - me.y) > 0.5 * lane_width) continue;
    const double dx = ahead ? o.x - me.x : me.x - o.x;
    if (dx > 0.0 && dx < best_dx) {
      best_dx = dx;
      best = i;
    }
  }
  return best;
}

RolloutResult rollout(const Scene& scene, const CandidateTrajectory& candidate,
                      EnvMode mode, const RoadModel& road,
                      const SimConfig& config) {
  const int steps = scene.steps();
  const double dt = scene.dt;
  if (static_cast<int>(candidate.points.size()) < steps + 1) {
    throw ConfigError("candidate has " +
                      std::to_string(candidate.points.size()) +
                      " points, scene horizon needs " +
                      std::to_string(steps + 1));
  }

  RolloutResult result;
  result.ego_states.reserve(steps + 1);
  result.influenced_decels.assign(steps + 1, {});

  const auto& p0 = candidate.points.front();
  VehicleState ego;
  ego.x = p0.x;
  ego.y = p0.y;
  ego.speed = std::hypot(p0.vx, p0.vy);
  ego.heading = ego.speed > kStandstill ? std::atan2(p0.vy, p0.vx) : 0.0;
  ego.accel = p0.ax;
  ego.length = scene.ego_length;
  ego.width = scene.ego_width;
  ego.mode = VehicleMode::kEgo;
  const double wheelbase = wheelbase_for(scene.ego_length, config);

  std::vector<Agent> agents;
  agents.reserve(scene.neighbor_tracks.size());
  for (const auto& [id, track] : scene.neighbor_tracks) {
    Agent a;
    a.id = id;
    a.log = &track;
    a.state.length = track.length;
    a.state.width = track.width;
    if (track.covers(scene.start_frame)) {
      a.state = from_log(track.at_frame(scene.start_frame), track.length,
                         track.width);
    } else {
      a.state.active = false;
    }
    agents.push_back(a);
  }

  const IDMParams& trigger_idm =
      mode == EnvMode::kForecast ? config.forecast_idm : config.reaction_idm;

  if (mode == EnvMode::kForecast) {
    const bool any_initial = std::any_of(
        agents.begin(), agents.end(),
        [](const Agent& a) { return a.state.active; });
    if (!agents.empty() && !any_initial) {
      throw ConfigError("scene " + scene.scene_id +
                        ": forecast mode needs neighbor states at the first "
                        "frame");
    }
    std::vector<LaneVehicle> traffic;
    traffic.push_back({scene.ego_id, ego.x, ego.y, ego.speed, ego.length,
                       std::max(ego.speed, kStandstill)});
    for (const auto& a : agents) {
      if (!a.state.active) continue;
      traffic.push_back({a.id, a.state.x, a.state.y, a.state.speed,
                         a.state.length, std::max(a.state.speed, kStandstill)});
    }
    for (auto& a : agents) {
      a.log = nullptr;
      if (!a.state.active) continue;
      a.state.mode = VehicleMode::kForecast;
      a.v0 = std::max(a.state.speed, kStandstill);
      const LaneVehicle self{a.id, a.state.x, a.state.y, a.state.speed,
                             a.state.length, a.v0};
      if (auto change = mobil_lane_choice(self, traffic, road,
                                          config.forecast_idm,
                                          config.forecast_mobil)) {
        const auto& log0 = scene.neighbor_tracks.at(a.id).at_frame(
            scene.start_frame);
        a.lateral_plan =
            solve_lateral(a.state.y, log0.vy, 0.0,
                          road.lane_center(change->target_lane), 0.0, 0.0,
                          scene.horizon);
      }
    }
  }

  auto snapshot_world = [&](const VehicleState& e) {
    std::vector<VehicleState> world;
    world.reserve(agents.size() + 1);
    world.push_back(e);
    for (const auto& a : agents) world.push_back(a.state);
    return world;
  };

  auto record = [&](int k) {
    result.ego_states.push_back(ego);
    for (const auto& a : agents) {
      auto& series = result.neighbor_states[a.id];
      series.resize(steps + 1);
      series[k] = a.state;
    }
  };

  auto check_collisions = [&](int k) {
    for (auto& a : agents) {
      if (!a.state.active || !collision_check(ego, a.state)) continue;
      if (!result.collision.occurred()) {
        result.collision = {Collision::Kind::kVehicle, a.id, k, k * dt};
      }
      a.frozen = true;
      a.state.speed = 0.0;
      a.state.accel = 0.0;
    }
    if (!result.collision.occurred() && curb_collision(ego, road)) {
      result.collision = {Collision::Kind::kCurb, 0, k, k * dt};
    }
  };

  check_collisions(0);
  record(0);

  for (int k = 1; k <= steps; ++k) {
    const auto previous = snapshot_world(ego);
    const double t_prev = (k - 1) * dt;

    const auto cmd = pure_pursuit_step(ego, candidate, t_prev,
                                       config.controller, wheelbase);
    ego = bicycle_step(ego, cmd.steer, cmd.accel, dt, wheelbase);

    for (std::size_t i = 0; i < agents.size(); ++i) {
      auto& a = agents[i];
      if (a.frozen) continue;
      const bool idm_driven = a.state.mode == VehicleMode::kIdmOverride ||
                              a.state.mode == VehicleMode::kForecast;
      if (idm_driven) {
        if (!a.state.active) continue;
        IDMParams idm = mode == EnvMode::kForecast ? config.forecast_idm
                                                   : config.reaction_idm;
        idm.v0 = config.v0_tracks_current_speed
                     ? std::max(a.state.speed, kStandstill)
                     : a.v0;
        double accel = idm_acceleration(a.state.speed, 0.0, kInf, idm);
        if (auto lead = nearest_in_lane(previous, i + 1, road.lane_width,
                                        true)) {
          const auto& f = previous[*lead];
          accel = idm_acceleration(a.state.speed, a.state.speed - f.speed,
                                   bumper_gap(previous[i + 1], f), idm);
        }
        advance_longitudinal(a.state, accel, dt);
        if (a.lateral_plan) {
          const double t = k * dt;
          a.state.y = a.lateral_plan->value(t);
          a.state.heading = std::atan2(a.lateral_plan->derivative(t, 1),
                                       std::max(a.state.speed, kStandstill));
        } else {
          a.state.heading = 0.0;
        }
        if (a.state.mode == VehicleMode::kIdmOverride) {
          result.influenced_decels[k][a.id] = accel;
        }
      } else if (a.log) {
        const long frame = scene.start_frame + k;
        if (a.log->covers(frame)) {
          a.state = from_log(a.log->at_frame(frame), a.log->length,
                             a.log->width);
        } else {
          a.state.active = false;
        }
      }
      if (a.state.x > road.length) a.state.active = false;
    }

    if (mode != EnvMode::kFixedReplay) {
      // Front-to-back so that a fresh override can trigger the vehicle
      // behind it within the same step.
      std::vector<std::size_t> order;
      for (std::size_t i = 0; i < agents.size(); ++i) {
        const auto& s = agents[i].state;
        const bool eligible =
            s.active && !agents[i].frozen &&
            (s.mode == VehicleMode::kReplay || s.mode == VehicleMode::kForecast) &&
            std::abs(s.x - ego.x) <= config.interaction_range;
        if (eligible) order.push_back(i);
      }
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return agents[a].state.x > agents[b].state.x;
      });
      for (std::size_t i : order) {
        const auto world = snapshot_world(ego);
        const auto lead = nearest_in_lane(world, i + 1, road.lane_width, true);
        if (!lead) continue;
        const auto& f = world[*lead];
        const bool reactive_front =
            *lead == 0 || f.mode == VehicleMode::kIdmOverride;
        if (!reactive_front) continue;
        auto& s = agents[i].state;
        const double gap = bumper_gap(s, f);
        if (gap < idm_desired_gap(s.speed, s.speed - f.speed, trigger_idm)) {
          if (s.mode == VehicleMode::kReplay) {
            agents[i].v0 = std::max(s.speed, kStandstill);
          }
          s.mode = VehicleMode::kIdmOverride;
          result.override_events.push_back({agents[i].id, k, k * dt});
        }
      }
    }

    check_collisions(k);
    record(k);
  }
  return result;
}

}  // namespace irldrive
