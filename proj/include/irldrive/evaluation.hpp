#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "irldrive/env_sim.hpp"
#include "irldrive/irl_core.hpp"
#include "irldrive/sampling.hpp"
#include "irldrive/scene.hpp"

namespace irldrive {

// Straight-line extrapolation of the initial velocity over the horizon.
CandidateTrajectory constant_velocity_predict(const Scene& scene);

// IDM longitudinal control behind the logged traffic plus at most one MOBIL
// lane change decided at t = 0 and executed as a quintic over the horizon.
// The desired speed is the initial speed.
CandidateTrajectory idm_mobil_predict(
    const Scene& scene, const RoadModel& road = RoadModel::us101(),
    const IDMParams& idm = IDMParams::baseline(),
    const MOBILParams& mobil = {});

struct SplitSizes {
  std::size_t train = 0;
  std::size_t test = 0;
};

// 35 train + 15 test when at least 50 scenes exist, otherwise a 70/30 split
// (rounded). Throws ConfigError when either side would be empty.
SplitSizes split_sizes(std::size_t scene_count);

struct SceneSplit {
  // Ascending scene indices.
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded random draw of split_sizes(scene_count) among the first
// train + test scenes.
SceneSplit split_scenes(std::size_t scene_count, std::uint64_t seed);

struct VehicleScenes {
  long vehicle_id = 0;
  std::vector<Scene> scenes;
};

struct TrainedModel {
  FeatureVector theta{};
  NormalizationConstants normalization;
  WeightLayout layout;
  TrainReport report;
  bool pooled = false;
};

enum class ModelingMode { kPersonalized, kGeneral };

struct EvalConfig {
  std::string method = "proposed";
  ModelingMode modeling = ModelingMode::kPersonalized;
  EnvMode train_env = EnvMode::kReactiveReplay;
  EnvMode test_env = EnvMode::kReactiveReplay;
  bool use_interaction_feature = true;
  TrainOptions train;
  // General-model training pool.
  std::size_t pool_vehicles = 20;
  std::size_t pool_scenes = 150;
};

struct SceneRow {
  long vehicle_id = 0;
  std::string scene_id;
  std::string split;
  std::string method;
  std::string env_mode;
  double human_likeness = 0.0;
};

struct VehicleSummary {
  long vehicle_id = 0;
  std::string method;
  // NaN where not applicable (baselines have no training phase).
  double train_human_likeness = 0.0;
  double train_log_likelihood = 0.0;
  double test_human_likeness = 0.0;
  std::size_t train_scenes = 0;
  std::size_t test_scenes = 0;
};

struct MethodSummary {
  std::string method;
  double train_human_likeness = 0.0;
  double train_log_likelihood = 0.0;
  double test_human_likeness = 0.0;
  std::size_t vehicles = 0;
};

struct EvalReport {
  std::vector<SceneRow> rows;
  std::vector<VehicleSummary> vehicles;
  std::vector<std::string> warnings;
};

// Mean over vehicles of the per-vehicle means, per method, in first-seen
// method order. NaN entries are skipped.
std::vector<MethodSummary> aggregate(const EvalReport& report);

// Trained models keyed by vehicle id; a general model is stored under
// kPooledModelKey.
using ModelSet = std::map<long, TrainedModel>;
inline constexpr long kPooledModelKey = -1;

struct ExperimentResult {
  EvalReport report;
  ModelSet models;
};

// Trains (or reuses `pretrained`) and scores the proposed method on each
// vehicle's held-out scenes. Scenes are split per vehicle with
// split_scenes(n, config.train.seed).
ExperimentResult run_experiment(const EvalConfig& config,
                                std::span<const VehicleScenes> vehicles,
                                SampleCache& samples,
                                const ModelSet* pretrained = nullptr);

enum class Baseline { kConstantVelocity, kIdmMobil };

std::string to_string(Baseline baseline);
Baseline baseline_from_string(const std::string& text);

EvalReport run_baseline(Baseline baseline,
                        std::span<const VehicleScenes> vehicles,
                        const SamplingConfig& config, std::uint64_t seed);

// Scores a trained model on one sampled scene.
double model_human_likeness(const TrainedModel& model,
                            const SceneSample& sample);

struct TableOptions {
  TrainOptions train;
  std::size_t pool_vehicles = 20;
  std::size_t pool_scenes = 150;
  bool general = true;
  bool forecast = true;
  bool baselines = true;
};

struct TableSection {
  std::string name;
  std::vector<MethodSummary> methods;
};

struct TableResult {
  // Scene rows of every run; methods are prefixed with their section.
  EvalReport report;
  std::vector<TableSection> sections;
};

// Personalized and general runs with both interaction ablations, the
// forecast-environment runs (reusing the log-replay models for the
// "proposed" rows) and the two baselines.
TableResult run_tables(std::span<const VehicleScenes> vehicles,
                       SampleCache& samples, const TableOptions& options = {});

}  // namespace irldrive
