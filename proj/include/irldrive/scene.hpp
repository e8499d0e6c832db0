#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace irldrive {

// NGSIM recording rate.
inline constexpr double kFrameDt = 0.1;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Kinematic sample in road-local coordinates (x along the road, y across).
struct TrackState {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double ax = 0.0;
  double ay = 0.0;
  int lane_id = 0;
};

// Gap-free time series of one vehicle. Frames are absolute NGSIM frame ids,
// so time is frame * dt.
struct VehicleTrack {
  long vehicle_id = 0;
  long first_frame = 0;
  double dt = kFrameDt;
  double length = 0.0;
  double width = 0.0;
  std::vector<TrackState> states;

  double t0() const { return first_frame * dt; }
  long last_frame() const {
    return first_frame + static_cast<long>(states.size()) - 1;
  }
  bool empty() const { return states.empty(); }
  bool covers(long frame) const {
    return !states.empty() && frame >= first_frame && frame <= last_frame();
  }
  const TrackState& at_frame(long frame) const {
    return states.at(static_cast<std::size_t>(frame - first_frame));
  }
  // Sub-track restricted to [from, to]; empty when the ranges do not meet.
  VehicleTrack slice(long from, long to) const;
};

// Tracks keyed by vehicle id. Ordered so that every traversal is deterministic.
using Dataset = std::map<long, VehicleTrack>;

// One fixed-horizon decision window centred on an ego vehicle.
struct Scene {
  std::string scene_id;
  long ego_id = 0;
  long start_frame = 0;
  double horizon = 5.0;
  double dt = kFrameDt;
  TrackState ego_init;
  double ego_length = 4.7;
  double ego_width = 1.8;
  std::map<long, VehicleTrack> neighbor_tracks;
  VehicleTrack ego_ground_truth;

  double start_time() const { return start_frame * dt; }
  int steps() const;
  long end_frame() const { return start_frame + steps(); }
  // True when the neighbor's slice stops before the window ends (it left the
  // study area).
  bool exits_early(long vehicle_id) const;
};

}  // namespace irldrive
