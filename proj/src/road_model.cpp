#include "irldrive/road_model.hpp"

#include <cmath>

#include "irldrive/errors.hpp"

namespace irldrive {

double RoadModel::lane_center(int lane_id) const {
  if (lane_id >= 1 && lane_id <= main_lanes) {
    return (lane_id - 0.5) * lane_width;
  }
  if (lane_id >= kAuxiliaryLane && lane_id <= kOffRamp) {
    return (main_lanes + 0.5) * lane_width;
  }
  throw DomainError("unknown lane id " + std::to_string(lane_id));
}

std::optional<int> RoadModel::lane_at(double x, double y) const {
  if (y < left_edge(x) || y > right_edge(x)) return std::nullopt;
  int k = static_cast<int>(std::floor(y / lane_width)) + 1;
  if (k <= main_lanes) return k < 1 ? 1 : k;
  if (x < on_ramp_end) return kOnRamp;
  if (x >= off_ramp_start) return kOffRamp;
  return kAuxiliaryLane;
}

double RoadModel::right_edge(double /*x*/) const {
  return (main_lanes + 1) * lane_width;
}

std::optional<int> RoadModel::left_neighbor(int lane_id) const {
  if (lane_id >= kAuxiliaryLane) return main_lanes;
  if (lane_id > 1) return lane_id - 1;
  return std::nullopt;
}

std::optional<int> RoadModel::right_neighbor(int lane_id) const {
  if (lane_id >= 1 && lane_id < main_lanes) return lane_id + 1;
  return std::nullopt;
}

}  // namespace irldrive
