#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "irldrive/features.hpp"
#include "irldrive/road_model.hpp"
#include "irldrive/sampling.hpp"
#include "irldrive/scene.hpp"

namespace irldrive {

struct SyntheticSceneOptions {
  double min_speed = 8.0;
  double max_speed = 14.0;
  // Chance that each slot (same-lane leader/follower, adjacent-lane
  // leader/follower) is occupied.
  double same_lane_density = 0.8;
  double adjacent_lane_density = 0.6;
};

// Random highway scenes around an ego in lanes 2-4 with constant-velocity
// neighbor logs. The recorded ego drives at constant velocity as well.
std::vector<Scene> synthetic_scenes(int count, std::uint64_t seed,
                                    const SyntheticSceneOptions& options = {},
                                    const RoadModel& road = RoadModel::us101());

// Replaces every sample's demonstration by a candidate drawn from the
// Boltzmann distribution of theta_true over the normalized candidate
// features; the truth endpoint becomes that candidate's endpoint.
std::vector<SceneSample> boltzmann_demonstrations(
    std::span<const SceneSample> samples, const FeatureVector& theta_true,
    const NormalizationConstants& constants, std::uint64_t seed);

struct SyntheticTrafficOptions {
  int vehicles = 10;
  double seconds = 60.0;
  std::uint64_t seed = 1;
  bool lane_changes = true;
  // Amplitude of the slow speed oscillation (m/s); 0 gives exact
  // constant-velocity traffic.
  double speed_wave = 1.0;
};

// Writes an NGSIM-format trajectory CSV (feet) of synthetic multi-lane
// traffic.
void write_synthetic_ngsim(std::ostream& out,
                           const SyntheticTrafficOptions& options = {});

}  // namespace irldrive
