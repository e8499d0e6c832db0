#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "irldrive/scene.hpp"
#include "irldrive/trajectory_gen.hpp"

namespace irldrive {

inline constexpr double kFeetToMeters = 0.3048;

enum class LengthUnit { kFeet, kMeters };

// One row of an NGSIM trajectory file, already in meters and with the
// source axes swapped (local_x is the lateral coordinate in the source).
struct RawSample {
  long vehicle_id = 0;
  long frame_id = 0;
  double local_x = 0.0;
  double local_y = 0.0;
  double length = 0.0;
  double width = 0.0;
  int lane_id = 0;
  long preceding_id = 0;
  long following_id = 0;
};

// Reads an NGSIM-format CSV into one unsmoothed track per vehicle (positions
// only; velocities and accelerations are zero until smooth_track).
//
// Throws SchemaError when a required column is absent and DataError on
// duplicate (vehicle, frame) rows, frame gaps, or out-of-range lane ids.
Dataset parse_ngsim_csv(const std::filesystem::path& path, LengthUnit unit);
Dataset parse_ngsim_csv(std::istream& in, LengthUnit unit);

struct SmoothingOptions {
  int half_window = 10;  // 21 samples = 2 s at 10 Hz
  int order = 3;
  double max_abs_accel = 10.0;
};

// Savitzky-Golay smoothing of both position axes; velocities and
// accelerations are the derivatives of the local fit.
// Throws TooShortError below one window and DataError when a smoothed
// acceleration exceeds the sanity bound.
VehicleTrack smooth_track(const VehicleTrack& raw,
                          const SmoothingOptions& options = {});

struct SegmentOptions {
  double horizon = 5.0;
  int count = 50;
  // Window spacing; defaults to the horizon (back-to-back windows).
  double stride = 0.0;
  double interaction_range = 50.0;
};

struct Segmentation {
  std::vector<Scene> scenes;
  std::vector<std::string> warnings;
};

// Cuts consecutive fixed-horizon windows from `track`. Each window
// [start, start + horizon) spans horizon/dt + 1 samples, so neighbouring
// windows share only their boundary sample. A vehicle becomes a neighbor when
// it is within interaction_range longitudinally of the ego at any frame of
// the window.
Segmentation segment_scenes(const VehicleTrack& track, const Dataset& dataset,
                            const SegmentOptions& options = {});

// Replaces the recorded ego trajectory by the quartic/quintic plan that joins
// its initial state to its final (vx, ax, y, vy, ay).
CandidateTrajectory refit_demonstration(const Scene& scene);

enum class StoreFormat { kCsv, kJsonLines };

// Canonical track store: one record per state with vehicle_id, t, x, y, vx,
// vy, ax, ay, lane_id, length, width (meters/seconds, 6 decimals).
void write_track_store(const Dataset& dataset, std::ostream& out,
                       StoreFormat format);
void write_track_store(const Dataset& dataset,
                       const std::filesystem::path& path, StoreFormat format);
Dataset read_track_store(std::istream& in, StoreFormat format);
Dataset read_track_store(const std::filesystem::path& path);

StoreFormat store_format_for(const std::filesystem::path& path);

}  // namespace irldrive
