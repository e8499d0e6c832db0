#include "irldrive/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <vector>

#include "irldrive/errors.hpp"

namespace irldrive {
namespace {

constexpr double kMinSpeed = 0.1;

}  // namespace

const std::array<std::string_view, kFeatureCount>& feature_names() {
  static const std::array<std::string_view, kFeatureCount> names{
      "speed",     "accel_x",   "accel_y",   "jerk_x",
      "front_risk", "rear_risk", "collision", "interaction"};
  return names;
}

FeatureVector step_features(const RolloutResult& rollout,
                            const CandidateTrajectory& plan, int k,
                            double lane_width) {
  FeatureVector f{};
  const auto& p = plan.points.at(k);
  f[kSpeed] = std::hypot(p.vx, p.vy);
  f[kAccelX] = std::abs(p.ax);
  f[kAccelY] = std::abs(p.ay);
  f[kJerkX] = std::abs(p.jx);

  std::vector<VehicleState> world;
  world.reserve(rollout.neighbor_states.size() + 1);
  world.push_back(rollout.ego_states.at(k));
  for (const auto& [id, states] : rollout.neighbor_states) {
    world.push_back(states.at(k));
  }
  const auto& ego = world.front();
  if (auto lead = nearest_in_lane(world, 0, lane_width, true)) {
    const double gap = world[*lead].x - ego.x;
    f[kFrontRisk] = std::exp(-gap / std::max(ego.speed, kMinSpeed));
  }
  if (auto rear = nearest_in_lane(world, 0, lane_width, false)) {
    const auto& r = world[*rear];
    f[kRearRisk] = std::exp(-(ego.x - r.x) / std::max(r.speed, kMinSpeed));
  }

  f[kCollision] = rollout.collision.active_at(k) ? 1.0 : 0.0;
  if (static_cast<std::size_t>(k) < rollout.influenced_decels.size()) {
    for (const auto& [id, a] : rollout.influenced_decels[k]) {
      if (a < 0.0) f[kInteraction] += -a;
    }
  }
  return f;
}

FeatureVector trajectory_features(const RolloutResult& rollout,
                                  const CandidateTrajectory& plan,
                                  double lane_width) {
  FeatureVector total{};
  const int steps = static_cast<int>(rollout.ego_states.size());
  for (int k = 0; k < steps; ++k) {
    const auto f = step_features(rollout, plan, k, lane_width);
    for (std::size_t i = 0; i < kFeatureCount; ++i) total[i] += f[i];
  }
  return total;
}

std::string NormalizationConstants::id() const {
  // FNV-1a over the printed divisors so the id survives a JSON round trip.
  std::uint64_t hash = 14695981039346656037ull;
  char buf[32];
  for (double d : divisors) {
    const int n = std::snprintf(buf, sizeof buf, "%.17g;", d);
    for (int i = 0; i < n; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ull;
    }
  }
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

NormalizationConstants fit_normalization(
    std::span<const FeatureVector> buffer) {
  if (buffer.empty()) {
    throw ConfigError("cannot normalize an empty feature buffer");
  }
  FeatureVector max{};
  for (const auto& row : buffer) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      max[i] = std::max(max[i], row[i]);
    }
  }
  NormalizationConstants c;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    c.divisors[i] = max[i] > 0.0 ? max[i] : 1.0;
  }
  return c;
}

FeatureVector normalize(const FeatureVector& raw,
                        const NormalizationConstants& constants) {
  FeatureVector out;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    out[i] = raw[i] / constants.divisors[i];
  }
  return out;
}

}  // namespace irldrive
