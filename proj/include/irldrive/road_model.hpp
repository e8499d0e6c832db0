#pragma once

#include <optional>

namespace irldrive {

// Straight multi-lane highway section in road-local coordinates: x runs along
// the road from the upstream edge of the study area, y runs across it from the
// left curb. Lane 1 is the leftmost main lane; lanes 6-8 are the auxiliary
// lane, the on-ramp and the off-ramp, which share the strip right of lane 5.
struct RoadModel {
  double length = 640.0;
  double lane_width = 3.66;
  int main_lanes = 5;
  // Longitudinal extents of the right-hand strip.
  double on_ramp_end = 130.0;
  double off_ramp_start = 430.0;

  static constexpr int kAuxiliaryLane = 6;
  static constexpr int kOnRamp = 7;
  static constexpr int kOffRamp = 8;

  static RoadModel us101() { return {}; }

  // Lateral center of `lane_id` (1..8).
  double lane_center(int lane_id) const;

  // Lane containing lateral position y at longitudinal position x, or nullopt
  // when y lies off the paved surface.
  std::optional<int> lane_at(double x, double y) const;

  // Paved lateral extent at x.
  double left_edge(double /*x*/) const { return 0.0; }
  double right_edge(double x) const;

  bool is_main_lane(int lane_id) const {
    return lane_id >= 1 && lane_id <= main_lanes;
  }

  // Lane-change targets available to a vehicle in `lane_id`. Only main lanes
  // are offered; the auxiliary and ramp lanes never appear as targets.
  std::optional<int> left_neighbor(int lane_id) const;
  std::optional<int> right_neighbor(int lane_id) const;
};

}  // namespace irldrive
