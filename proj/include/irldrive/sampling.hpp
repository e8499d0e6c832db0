#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "irldrive/env_sim.hpp"
#include "irldrive/features.hpp"
#include "irldrive/irl_core.hpp"
#include "irldrive/road_model.hpp"
#include "irldrive/scene.hpp"
#include "irldrive/trajectory_gen.hpp"

namespace irldrive {

// Raw (unnormalized) features of one scene: the refit demonstration and
// every generated candidate, plus rolled-out endpoints.
struct SceneSample {
  std::string scene_id;
  FeatureVector demo{};
  // Recorded ego position at the end of the window.
  Point2 truth;
  std::vector<FeatureVector> candidates;
  std::vector<Point2> endpoints;
};

struct SamplingConfig {
  SamplingSpace space;
  SimConfig sim;
  RoadModel road = RoadModel::us101();
};

SceneSample sample_scene(const Scene& scene, EnvMode mode,
                         const SamplingConfig& config = {});

// Fits constants over demonstrations and candidates of every sample.
NormalizationConstants fit_normalization(std::span<const SceneSample> samples);

SceneEntry to_entry(const SceneSample& sample,
                    const NormalizationConstants& constants);
std::vector<SceneEntry> to_entries(std::span<const SceneSample> samples,
                                   const NormalizationConstants& constants);

// Memoizes samples per (scene id, environment mode).
class SampleCache {
 public:
  explicit SampleCache(SamplingConfig config = {}) : config_(std::move(config)) {}

  const SceneSample& get(const Scene& scene, EnvMode mode);
  const SamplingConfig& config() const { return config_; }

 private:
  SamplingConfig config_;
  std::map<std::pair<std::string, EnvMode>, SceneSample> cache_;
};

}  // namespace irldrive
