#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "irldrive/env_sim.hpp"
#include "irldrive/evaluation.hpp"
#include "irldrive/features.hpp"
#include "irldrive/irl_core.hpp"
#include "irldrive/sampling.hpp"

namespace irldrive {

inline constexpr int kSchemaVersion = 1;

// ---- sampled-trajectory buffer -------------------------------------------
//
// One CSV per vehicle: scene_id, split, candidate_id, is_demo, the 8 raw
// features, end_x, end_y. Candidates come first and the demonstration row
// (candidate_id -1, end = recorded endpoint) closes each scene, so a scene
// is complete exactly when its demonstration row is present.

struct BufferScene {
  std::string split;
  SceneSample sample;
};

std::string buffer_header();
void write_buffer_scene(std::ostream& out, const BufferScene& scene);

// Complete scenes in file order; a trailing partial scene is dropped.
// Throws SchemaError on an unexpected header or malformed row.
std::vector<BufferScene> read_buffer(std::istream& in);
std::vector<BufferScene> read_buffer(const std::filesystem::path& path);

struct BufferMeta {
  long vehicle_id = 0;
  EnvMode env_mode = EnvMode::kReactiveReplay;
  std::size_t scenes = 0;
  // Fitted over the training split.
  NormalizationConstants normalization;
};

std::filesystem::path sidecar_path(const std::filesystem::path& buffer);
void write_buffer_meta(const std::filesystem::path& path,
                       const BufferMeta& meta);
BufferMeta read_buffer_meta(const std::filesystem::path& path);

// ---- model file -----------------------------------------------------------

struct ModelFile {
  FeatureVector theta{};
  WeightLayout layout;
  TrainOptions options;
  NormalizationConstants normalization;
  bool pooled = false;
  EnvMode env_mode = EnvMode::kReactiveReplay;
  std::vector<long> vehicles;
  std::string config_hash;
};

std::string model_json(const ModelFile& model);
void write_model(const std::filesystem::path& path, const ModelFile& model);
// Throws SchemaError on a missing field or an unknown schema version.
ModelFile read_model(const std::filesystem::path& path);

// ---- reports --------------------------------------------------------------

void write_train_report(std::ostream& out, const TrainReport& report);
void write_scene_rows(std::ostream& out, const std::vector<SceneRow>& rows);

// Writes `text` to `path` only through a temporary file, so readers never
// see a half-written file.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& text);

std::string read_file(const std::filesystem::path& path);

// Fixed-precision text for doubles in reports ("nan" for NaN).
std::string format_double(double v);

}  // namespace irldrive
