#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "irldrive/env_sim.hpp"
#include "irldrive/trajectory_gen.hpp"

namespace irldrive {

inline constexpr std::size_t kFeatureCount = 8;

enum FeatureIndex : std::size_t {
  kSpeed = 0,
  kAccelX,
  kAccelY,
  kJerkX,
  kFrontRisk,
  kRearRisk,
  kCollision,
  kInteraction,
};

using FeatureVector = std::array<double, kFeatureCount>;

// Column names used in every persisted table, in FeatureIndex order.
const std::array<std::string_view, kFeatureCount>& feature_names();

// Raw per-step features at step k. Ego speed and comfort terms come from the
// plan (polynomial samples); risk terms use the rolled-out positions, with
// speeds below 0.1 m/s clamped to 0.1 and absent vehicles contributing 0.
FeatureVector step_features(const RolloutResult& rollout,
                            const CandidateTrajectory& plan, int k,
                            double lane_width);

// Sum of step_features over every recorded step.
FeatureVector trajectory_features(const RolloutResult& rollout,
                                  const CandidateTrajectory& plan,
                                  double lane_width);

struct NormalizationConstants {
  FeatureVector divisors{1, 1, 1, 1, 1, 1, 1, 1};

  // Stable fingerprint of the divisors, used to refuse mixing feature
  // scales between a model and a buffer.
  std::string id() const;
};

// Column-wise maximum over `buffer`; zero columns get divisor 1.
// Throws ConfigError for an empty buffer.
NormalizationConstants fit_normalization(std::span<const FeatureVector> buffer);

FeatureVector normalize(const FeatureVector& raw,
                        const NormalizationConstants& constants);

}  // namespace irldrive
