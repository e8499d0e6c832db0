#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "irldrive/data_ingest.hpp"
#include "irldrive/env_sim.hpp"
#include "irldrive/irl_core.hpp"
#include "irldrive/sampling.hpp"

namespace irldrive {

// Everything a command needs besides file paths. Defaults reproduce the
// reference setup; a JSON config file overrides them and command-line flags
// override the file.
struct RunConfig {
  std::uint64_t seed = 0;
  LengthUnit unit = LengthUnit::kFeet;
  SmoothingOptions smoothing;
  SegmentOptions segment;
  SamplingSpace space;
  SimConfig sim;
  EnvMode env_mode = EnvMode::kReactiveReplay;
  TrainOptions train;
  bool ablate_interaction = false;
  std::size_t pool_vehicles = 20;
  std::size_t pool_scenes = 150;
  // Vehicles used by the experiment command (first N by id).
  std::size_t max_vehicles = 100;

  SamplingConfig sampling() const;
  TrainOptions train_options() const;
};

// Applies the keys present in `json_text` on top of `config`. Unknown keys
// and non-positive values where a positive one is needed raise ConfigError.
void apply_config_json(RunConfig& config, const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

// Canonical JSON of the full config and its FNV-1a hash (16 hex digits).
std::string config_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

void validate(const RunConfig& config);

}  // namespace irldrive
