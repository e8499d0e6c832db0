#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "irldrive/road_model.hpp"
#include "irldrive/scene.hpp"
#include "irldrive/trajectory_gen.hpp"

namespace irldrive {

enum class VehicleMode { kReplay, kIdmOverride, kEgo, kForecast };

struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  double length = 4.7;
  double width = 1.8;
  VehicleMode mode = VehicleMode::kReplay;
  // False while the vehicle is outside its recorded span or past the end of
  // the road; inactive vehicles take part in no interaction.
  bool active = true;
};

struct IDMParams {
  double v0 = 10.0;
  double a_max = 5.0;
  double tau = 1.0;
  double b = 3.0;
  double s0 = 1.0;
  double delta = 4.0;

  // Reaction model inside the rollout environment.
  static IDMParams training_environment() { return {}; }
  // Tuned car-following parameters of the IDM+MOBIL comparison model.
  static IDMParams baseline() { return {10.0, 1.3, 1.2, 0.7, 1.5, 4.0}; }
};

struct MOBILParams {
  double b_safe = 2.0;
  double politeness = 0.01;
  double a_th = 0.2;
};

// Desired bumper-to-bumper gap s* for speed v and approach rate dv.
double idm_desired_gap(double v, double dv, const IDMParams& p);

// IDM acceleration, clamped to [-9, a_max]. `gap` is bumper-to-bumper and
// may be +infinity for a free road.
double idm_acceleration(double v, double dv, double gap, const IDMParams& p);

struct ControllerParams {
  double min_lookahead = 4.0;
  double lookahead_time = 0.8;
  double max_steer = 0.6;
  double min_accel = -9.0;
  double max_accel = 5.0;
};

struct ControlCommand {
  double steer = 0.0;
  double accel = 0.0;
};

// Geometric pure-pursuit steering toward a lookahead point on `reference`
// plus speed tracking of the reference speed at the lookahead time. Times
// beyond the reference hold its last state and extend it along its final
// velocity.
ControlCommand pure_pursuit_step(const VehicleState& state,
                                 const CandidateTrajectory& reference,
                                 double t, const ControllerParams& params,
                                 double wheelbase);

// Kinematic single-track update (explicit Euler on the previous speed).
VehicleState bicycle_step(const VehicleState& state, double steer,
                          double accel, double dt, double wheelbase);

// Oriented-rectangle overlap (separating axis test). Touching boxes do not
// collide.
bool collision_check(const VehicleState& a, const VehicleState& b);

// True when any corner of the vehicle leaves the paved surface.
bool curb_collision(const VehicleState& state, const RoadModel& road);

enum class EnvMode { kReactiveReplay, kFixedReplay, kForecast };

std::string to_string(EnvMode mode);
EnvMode env_mode_from_string(const std::string& text);

struct OverrideEvent {
  long vehicle_id = 0;
  int step = 0;
  double t = 0.0;
};

struct Collision {
  enum class Kind { kNone, kVehicle, kCurb };
  Kind kind = Kind::kNone;
  long vehicle_id = 0;
  int step = -1;
  double t = 0.0;

  bool occurred() const { return kind != Kind::kNone; }
  // Latched indicator: 1 from the first collision step onward.
  bool active_at(int k) const { return occurred() && k >= step; }
};

struct RolloutResult {
  std::vector<VehicleState> ego_states;
  std::map<long, std::vector<VehicleState>> neighbor_states;
  std::vector<OverrideEvent> override_events;
  Collision collision;
  // Per step: acceleration of every vehicle under IDM override at that step.
  std::vector<std::map<long, double>> influenced_decels;

  Point2 ego_endpoint() const {
    return {ego_states.back().x, ego_states.back().y};
  }
};

struct SimConfig {
  IDMParams reaction_idm = IDMParams::training_environment();
  IDMParams forecast_idm = IDMParams::baseline();
  MOBILParams forecast_mobil;
  ControllerParams controller;
  double interaction_range = 50.0;
  double wheelbase_ratio = 0.6;
  double max_speed = 40.0;
  // When set, an overridden vehicle's desired speed follows its current
  // speed instead of staying at its speed when the override began.
  bool v0_tracks_current_speed = false;
};

double wheelbase_for(double length, const SimConfig& config);

// Simulates the ego following `candidate` among the scene's neighbors for
// the scene horizon.
//
// kReactiveReplay: neighbors replay their logs until their front vehicle is
// the ego or an overridden vehicle and the gap drops below s*; from then on
// they follow IDM longitudinally (lateral position frozen).
// kFixedReplay: neighbors always replay their logs.
// kForecast: neighbors present at the first frame are driven by IDM+MOBIL
// without log access. Throws ConfigError when the scene lists neighbors but
// none has an initial state.
RolloutResult rollout(const Scene& scene, const CandidateTrajectory& candidate,
                      EnvMode mode, const RoadModel& road,
                      const SimConfig& config = {});

// Active vehicle of `world` nearest ahead of (or behind) world[self] whose
// centre lies within half a lane width laterally.
std::optional<std::size_t> nearest_in_lane(
    const std::vector<VehicleState>& world, std::size_t self,
    double lane_width, bool ahead);

// Bumper-to-bumper gap from `rear` to `front`.
double bumper_gap(const VehicleState& rear, const VehicleState& front);

}  // namespace irldrive
