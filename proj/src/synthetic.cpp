#include "irldrive/synthetic.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>

#include "irldrive/data_ingest.hpp"
#include "irldrive/irl_core.hpp"
#include "irldrive/trajectory_gen.hpp"

namespace irldrive {
namespace {

constexpr double kCarLength = 4.7;
constexpr double kCarWidth = 1.8;

VehicleTrack constant_velocity_track(long id, long first_frame, int samples,
                                     double x, double y, double v, int lane) {
  VehicleTrack t;
  t.vehicle_id = id;
  t.first_frame = first_frame;
  t.length = kCarLength;
  t.width = kCarWidth;
  for (int k = 0; k < samples; ++k) {
    TrackState s;
    s.x = x + v * k * kFrameDt;
    s.y = y;
    s.vx = v;
    s.lane_id = lane;
    t.states.push_back(s);
  }
  return t;
}

}  // namespace

std::vector<Scene> synthetic_scenes(int count, std::uint64_t seed,
                                    const SyntheticSceneOptions& options,
                                    const RoadModel& road) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<Scene> scenes;
  for (int i = 0; i < count; ++i) {
    Scene scene;
    scene.scene_id = "synth_" + std::to_string(i);
    scene.ego_id = 0;
    scene.start_frame = 1000;
    const int samples = scene.steps() + 1;

    const int lane = 2 + static_cast<int>(unit(rng) * 3.0);
    const double v = uniform(options.min_speed, options.max_speed);
    const double x = uniform(100.0, 200.0);
    const double y = road.lane_center(lane);
    scene.ego_init = {x, y, v, 0.0, 0.0, 0.0, lane};
    scene.ego_ground_truth = constant_velocity_track(0, scene.start_frame,
                                                     samples, x, y, v, lane);

    long next_id = 1;
    auto add = [&](int l, double dx, double speed) {
      scene.neighbor_tracks.emplace(
          next_id, constant_velocity_track(next_id, scene.start_frame, samples,
                                           x + dx, road.lane_center(l),
                                           std::max(speed, 0.0), l));
      ++next_id;
    };
    if (unit(rng) < options.same_lane_density) {
      add(lane, uniform(12.0, 40.0), v + uniform(-4.0, 2.0));
    }
    if (unit(rng) < options.same_lane_density) {
      add(lane, -uniform(8.0, 25.0), v + uniform(-2.0, 3.0));
    }
    for (int side : {lane - 1, lane + 1}) {
      if (unit(rng) < options.adjacent_lane_density) {
        add(side, uniform(6.0, 40.0), v + uniform(-3.0, 3.0));
      }
      if (unit(rng) < options.adjacent_lane_density) {
        add(side, -uniform(6.0, 30.0), v + uniform(-2.0, 4.0));
      }
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

std::vector<SceneSample> boltzmann_demonstrations(
    std::span<const SceneSample> samples, const FeatureVector& theta_true,
    const NormalizationConstants& constants, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SceneSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    const auto p = candidate_distribution(theta_true, to_entry(s, constants));
    std::discrete_distribution<std::size_t> pick(p.begin(), p.end());
    const std::size_t chosen = pick(rng);
    SceneSample demo = s;
    demo.demo = s.candidates[chosen];
    demo.truth = s.endpoints[chosen];
    out.push_back(std::move(demo));
  }
  return out;
}

void write_synthetic_ngsim(std::ostream& out,
                           const SyntheticTrafficOptions& options) {
  const RoadModel road = RoadModel::us101();
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  out << "Vehicle_ID,Frame_ID,Total_Frames,Global_Time,Local_X,Local_Y,"
         "Global_X,Global_Y,v_Length,v_Width,v_Class,v_Vel,v_Acc,Lane_ID,"
         "Preceding,Following,Space_Headway,Time_Headway\n";

  const int frames = static_cast<int>(std::lround(options.seconds / kFrameDt)) + 1;
  constexpr double kPeriod = 20.0;
  const double omega = 2.0 * std::numbers::pi / kPeriod;
  std::array<double, 6> lane_speed{};
  std::array<double, 6> lane_phase{};
  for (int l = 1; l <= 5; ++l) {
    lane_speed[l] = 8.0 + 0.6 * l + unit(rng);
    lane_phase[l] = 2.0 * std::numbers::pi * unit(rng);
  }
  std::array<int, 6> slots{};

  char buf[256];
  for (int id = 1; id <= options.vehicles; ++id) {
    const int lane = 1 + (id - 1) % 5;
    const int slot = slots[lane]++;
    const double x0 = 30.0 + 35.0 * slot + 5.0 * unit(rng);
    const double base = lane_speed[lane];
    const double phase = lane_phase[lane];
    const double wave = options.speed_wave;

    // One quintic lane change for every third vehicle.
    std::optional<Quintic> change;
    double change_start = 0.0;
    constexpr double kChangeTime = 4.0;
    if (options.lane_changes && id % 3 == 0) {
      const int target = lane == 5 ? 4 : lane + 1;
      change_start = options.seconds * (0.3 + 0.2 * unit(rng));
      change = solve_lateral(road.lane_center(lane), 0, 0,
                             road.lane_center(target), 0, 0, kChangeTime);
    }

    for (int k = 0; k < frames; ++k) {
      const double t = k * kFrameDt;
      const double x = x0 + base * t +
                       wave / omega * (std::cos(phase) - std::cos(omega * t + phase));
      const double v = base + wave * std::sin(omega * t + phase);
      const double a = wave * omega * std::cos(omega * t + phase);
      double y = road.lane_center(lane);
      if (change && t > change_start) {
        y = change->value(std::min(t - change_start, kChangeTime));
      }
      const int lane_now = road.lane_at(x, y).value_or(lane);
      std::snprintf(buf, sizeof buf,
                    "%d,%d,%d,%lld,%.3f,%.3f,0,0,%.1f,%.1f,2,%.3f,%.3f,%d,0,0,0,0\n",
                    id, k + 1, frames,
                    static_cast<long long>(1118846980200LL + k * 100),
                    y / kFeetToMeters, x / kFeetToMeters,
                    kCarLength / kFeetToMeters, kCarWidth / kFeetToMeters,
                    v / kFeetToMeters, a / kFeetToMeters, lane_now);
      out << buf;
    }
  }
}

}  // namespace irldrive
