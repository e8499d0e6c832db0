#include "irldrive/scene.hpp"

#include <algorithm>
#include <cmath>

namespace irldrive {

VehicleTrack VehicleTrack::slice(long from, long to) const {
  VehicleTrack out;
  out.vehicle_id = vehicle_id;
  out.dt = dt;
  out.length = length;
  out.width = width;
  if (states.empty()) return out;
  const long lo = std::max(from, first_frame);
  const long hi = std::min(to, last_frame());
  if (lo > hi) return out;
  out.first_frame = lo;
  out.states.assign(states.begin() + (lo - first_frame),
                    states.begin() + (hi - first_frame) + 1);
  return out;
}

int Scene::steps() const {
  return static_cast<int>(std::lround(horizon / dt));
}

bool Scene::exits_early(long vehicle_id) const {
  auto it = neighbor_tracks.find(vehicle_id);
  if (it == neighbor_tracks.end()) return false;
  return it->second.empty() || it->second.last_frame() < end_frame();
}

}  // namespace irldrive
