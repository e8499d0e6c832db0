#pragma once

#include <optional>
#include <span>

#include "irldrive/env_sim.hpp"
#include "irldrive/road_model.hpp"

namespace irldrive {

// Minimal per-vehicle view used for lane-change decisions. Lanes are
// recovered from the road geometry; desired_speed is the vehicle's own IDM v0.
struct LaneVehicle {
  long id = 0;
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
  double length = 4.7;
  double desired_speed = 10.0;
};

struct LaneChangeEvaluation {
  int target_lane = 0;
  bool safe = false;
  double incentive = 0.0;
  // Acceleration the new follower would need after the change (0 if none).
  double new_follower_accel = 0.0;
  bool accepted = false;
};

// MOBIL criteria for moving `subject` from its lane into `target_lane`:
// incentive  a~_c - a_c + p * ((a~_n - a_n) + (a~_o - a_o)) > a_th,
// safety     a~_n >= -b_safe.
LaneChangeEvaluation evaluate_lane_change(const LaneVehicle& subject,
                                          int target_lane,
                                          std::span<const LaneVehicle> others,
                                          const RoadModel& road,
                                          const IDMParams& idm,
                                          const MOBILParams& mobil);

// Best accepted change to the left or right main lane, if any.
std::optional<LaneChangeEvaluation> mobil_lane_choice(
    const LaneVehicle& subject, std::span<const LaneVehicle> others,
    const RoadModel& road, const IDMParams& idm, const MOBILParams& mobil);

}  // namespace irldrive
