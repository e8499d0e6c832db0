#include "irldrive/sampling.hpp"

#include "irldrive/data_ingest.hpp"

namespace irldrive {

SceneSample sample_scene(const Scene& scene, EnvMode mode,
                         const SamplingConfig& config) {
  SceneSample sample;
  sample.scene_id = scene.scene_id;
  const auto& last = scene.ego_ground_truth.states.back();
  sample.truth = {last.x, last.y};

  const double lane_width = config.road.lane_width;
  const auto demo = refit_demonstration(scene);
  const auto demo_run = rollout(scene, demo, mode, config.road, config.sim);
  sample.demo = trajectory_features(demo_run, demo, lane_width);

  for (const auto& candidate :
       generate_candidates(scene, config.road, config.space)) {
    const auto run = rollout(scene, candidate, mode, config.road, config.sim);
    sample.candidates.push_back(
        trajectory_features(run, candidate, lane_width));
    sample.endpoints.push_back(run.ego_endpoint());
  }
  return sample;
}

NormalizationConstants fit_normalization(
    std::span<const SceneSample> samples) {
  std::vector<FeatureVector> rows;
  for (const auto& s : samples) {
    rows.push_back(s.demo);
    rows.insert(rows.end(), s.candidates.begin(), s.candidates.end());
  }
  return fit_normalization(std::span<const FeatureVector>(rows));
}

SceneEntry to_entry(const SceneSample& sample,
                    const NormalizationConstants& constants) {
  SceneEntry e;
  e.scene_id = sample.scene_id;
  e.demo = normalize(sample.demo, constants);
  e.candidates.reserve(sample.candidates.size());
  for (const auto& f : sample.candidates) {
    e.candidates.push_back(normalize(f, constants));
  }
  e.endpoints = sample.endpoints;
  e.truth = sample.truth;
  return e;
}

std::vector<SceneEntry> to_entries(std::span<const SceneSample> samples,
                                   const NormalizationConstants& constants) {
  std::vector<SceneEntry> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(to_entry(s, constants));
  return out;
}

const SceneSample& SampleCache::get(const Scene& scene, EnvMode mode) {
  const auto key = std::make_pair(scene.scene_id, mode);
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    it = cache_.emplace(key, sample_scene(scene, mode, config_)).first;
  }
  return it->second;
}

}  // namespace irldrive
