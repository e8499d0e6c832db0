#include "irldrive/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "irldrive/errors.hpp"
#include "irldrive/human_likeness.hpp"
#include "irldrive/mobil.hpp"

namespace irldrive {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Point2 endpoint_of(const CandidateTrajectory& trajectory) {
  const auto& p = trajectory.points.back();
  return {p.x, p.y};
}

Point2 truth_of(const Scene& scene) {
  const auto& s = scene.ego_ground_truth.states.back();
  return {s.x, s.y};
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++n;
  }
  return n ? sum / static_cast<double>(n) : kNaN;
}

struct Split {
  std::vector<const Scene*> train;
  std::vector<const Scene*> test;
};

Split split_vehicle(const VehicleScenes& v, std::uint64_t seed) {
  const auto idx = split_scenes(v.scenes.size(), seed);
  Split s;
  for (std::size_t i : idx.train) s.train.push_back(&v.scenes[i]);
  for (std::size_t i : idx.test) s.test.push_back(&v.scenes[i]);
  return s;
}

TrainedModel fit_model(const std::vector<SceneSample>& samples,
                       const EvalConfig& config, bool pooled) {
  TrainedModel model;
  model.pooled = pooled;
  model.normalization = fit_normalization(std::span<const SceneSample>(samples));
  TrainOptions options = config.train;
  options.layout = config.use_interaction_feature
                       ? WeightLayout::standard()
                       : WeightLayout::without(kInteraction);
  model.layout = options.layout;
  const auto entries = to_entries(samples, model.normalization);
  model.report = train(entries, options);
  model.theta = model.report.theta;
  return model;
}

std::vector<SceneSample> sample_all(const std::vector<const Scene*>& scenes,
                                    EnvMode mode, SampleCache& cache) {
  std::vector<SceneSample> out;
  out.reserve(scenes.size());
  for (const Scene* s : scenes) out.push_back(cache.get(*s, mode));
  return out;
}

}  // namespace

CandidateTrajectory constant_velocity_predict(const Scene& scene) {
  CandidateTrajectory traj;
  traj.source = TrajectorySource::kBaseline;
  const auto& s = scene.ego_init;
  for (int k = 0; k <= scene.steps(); ++k) {
    const double t = k * scene.dt;
    TrajectoryPoint p;
    p.t = t;
    p.x = s.x + s.vx * t;
    p.y = s.y + s.vy * t;
    p.vx = s.vx;
    p.vy = s.vy;
    traj.points.push_back(p);
  }
  return traj;
}

CandidateTrajectory idm_mobil_predict(const Scene& scene, const RoadModel& road,
                                      const IDMParams& idm,
                                      const MOBILParams& mobil) {
  const auto& s = scene.ego_init;
  IDMParams ego_idm = idm;
  ego_idm.v0 = std::max(s.vx, 0.1);

  std::vector<LaneVehicle> traffic;
  traffic.push_back({scene.ego_id, s.x, s.y, s.vx, scene.ego_length,
                     ego_idm.v0});
  for (const auto& [id, track] : scene.neighbor_tracks) {
    if (!track.covers(scene.start_frame)) continue;
    const auto& n = track.at_frame(scene.start_frame);
    traffic.push_back({id, n.x, n.y, n.vx, track.length, std::max(n.vx, 0.1)});
  }
  double y_end = s.y;
  if (auto change = mobil_lane_choice(traffic.front(), traffic, road, idm,
                                      mobil)) {
    y_end = road.lane_center(change->target_lane);
  }
  const Quintic lateral =
      solve_lateral(s.y, s.vy, s.ay, y_end, 0.0, 0.0, scene.horizon);

  CandidateTrajectory traj;
  traj.source = TrajectorySource::kBaseline;
  double x = s.x;
  double v = std::max(s.vx, 0.0);
  double a = 0.0;
  for (int k = 0; k <= scene.steps(); ++k) {
    const double t = k * scene.dt;
    if (k > 0) {
      // Leader from the logged traffic at the previous frame.
      const double y_prev = lateral.value(t - scene.dt);
      const long frame = scene.start_frame + k - 1;
      double gap = std::numeric_limits<double>::infinity();
      double lead_v = 0.0;
      for (const auto& [id, track] : scene.neighbor_tracks) {
        if (!track.covers(frame)) continue;
        const auto& n = track.at_frame(frame);
        if (n.x <= x || std::abs(n.y - y_prev) > 0.5 * road.lane_width) continue;
        const double g = n.x - x - 0.5 * (track.length + scene.ego_length);
        if (g < gap) {
          gap = g;
          lead_v = n.vx;
        }
      }
      a = idm_acceleration(v, std::isfinite(gap) ? v - lead_v : 0.0, gap,
                           ego_idm);
      const double dt = scene.dt;
      if (v + a * dt < 0.0) {
        x += a < 0.0 ? -v * v / (2.0 * a) : 0.0;
        v = 0.0;
      } else {
        x += v * dt + 0.5 * a * dt * dt;
        v += a * dt;
      }
    }
    TrajectoryPoint p;
    p.t = t;
    p.x = x;
    p.y = lateral.value(t);
    p.vx = v;
    p.vy = lateral.derivative(t, 1);
    p.ax = a;
    p.ay = lateral.derivative(t, 2);
    traj.points.push_back(p);
  }
  return traj;
}

SplitSizes split_sizes(std::size_t scene_count) {
  SplitSizes sizes;
  if (scene_count >= 50) {
    sizes = {35, 15};
  } else {
    sizes.train = static_cast<std::size_t>(
        std::lround(0.7 * static_cast<double>(scene_count)));
    sizes.test = scene_count - sizes.train;
  }
  if (sizes.train == 0 || sizes.test == 0) {
    throw ConfigError("insufficient scenes for a train/test split (" +
                      std::to_string(scene_count) + ")");
  }
  return sizes;
}

SceneSplit split_scenes(std::size_t scene_count, std::uint64_t seed) {
  const auto sizes = split_sizes(scene_count);
  std::vector<std::size_t> idx(sizes.train + sizes.test);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  SceneSplit split;
  split.train.assign(idx.begin(), idx.begin() + sizes.train);
  split.test.assign(idx.begin() + sizes.train, idx.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<MethodSummary> aggregate(const EvalReport& report) {
  std::vector<MethodSummary> out;
  std::vector<std::vector<const VehicleSummary*>> groups;
  for (const auto& v : report.vehicles) {
    auto it = std::find_if(out.begin(), out.end(), [&](const MethodSummary& m) {
      return m.method == v.method;
    });
    if (it == out.end()) {
      out.push_back({v.method});
      groups.emplace_back();
      it = out.end() - 1;
    }
    groups[it - out.begin()].push_back(&v);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::vector<double> hl_train, ll_train, hl_test;
    for (const auto* v : groups[i]) {
      hl_train.push_back(v->train_human_likeness);
      ll_train.push_back(v->train_log_likelihood);
      hl_test.push_back(v->test_human_likeness);
    }
    out[i].train_human_likeness = mean_of(hl_train);
    out[i].train_log_likelihood = mean_of(ll_train);
    out[i].test_human_likeness = mean_of(hl_test);
    out[i].vehicles = groups[i].size();
  }
  return out;
}

double model_human_likeness(const TrainedModel& model,
                            const SceneSample& sample) {
  const auto entry = to_entry(sample, model.normalization);
  return human_likeness(candidate_distribution(model.theta, entry),
                        entry.endpoints, entry.truth);
}

ExperimentResult run_experiment(const EvalConfig& config,
                                std::span<const VehicleScenes> vehicles,
                                SampleCache& samples,
                                const ModelSet* pretrained) {
  ExperimentResult result;
  auto& report = result.report;
  const std::string env_name = to_string(config.test_env);

  std::vector<Split> splits;
  splits.reserve(vehicles.size());
  for (const auto& v : vehicles) {
    splits.push_back(split_vehicle(v, config.train.seed));
  }

  if (config.modeling == ModelingMode::kGeneral) {
    const std::size_t pool = std::min(config.pool_vehicles, vehicles.size());
    if (pool < 20) {
      report.warnings.push_back("training pool has " + std::to_string(pool) +
                                " vehicles, below the reference pool of 20");
    }
    if (pretrained) {
      result.models[kPooledModelKey] = pretrained->at(kPooledModelKey);
    } else {
      std::vector<const Scene*> scenes;
      for (std::size_t i = 0; i < pool; ++i) {
        scenes.insert(scenes.end(), splits[i].train.begin(),
                      splits[i].train.end());
      }
      if (scenes.size() > config.pool_scenes) {
        std::vector<std::size_t> idx(scenes.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::mt19937_64 rng(config.train.seed);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(config.pool_scenes);
        std::sort(idx.begin(), idx.end());
        std::vector<const Scene*> picked;
        for (std::size_t i : idx) picked.push_back(scenes[i]);
        scenes = std::move(picked);
      }
      result.models[kPooledModelKey] =
          fit_model(sample_all(scenes, config.train_env, samples), config, true);
    }
  }

  for (std::size_t vi = 0; vi < vehicles.size(); ++vi) {
    const auto& vehicle = vehicles[vi];
    const auto& split = splits[vi];
    const auto train_samples = sample_all(split.train, config.train_env, samples);

    const TrainedModel* model = nullptr;
    VehicleSummary summary;
    summary.vehicle_id = vehicle.vehicle_id;
    summary.method = config.method;
    summary.train_scenes = split.train.size();
    summary.test_scenes = split.test.size();

    if (config.modeling == ModelingMode::kGeneral) {
      model = &result.models.at(kPooledModelKey);
    } else if (pretrained) {
      model = &(result.models[vehicle.vehicle_id] =
                    pretrained->at(vehicle.vehicle_id));
    } else {
      model = &(result.models[vehicle.vehicle_id] =
                    fit_model(train_samples, config, false));
    }

    if (pretrained) {
      summary.train_human_likeness = kNaN;
      summary.train_log_likelihood = kNaN;
    } else {
      const auto entries = to_entries(train_samples, model->normalization);
      TrainOptions options = config.train;
      options.layout = model->layout;
      const auto rec = evaluate_epoch(model->theta, entries, options, 0);
      summary.train_human_likeness = rec.train_human_likeness;
      summary.train_log_likelihood = rec.mean_log_likelihood;
    }
    for (std::size_t i = 0; i < split.train.size(); ++i) {
      report.rows.push_back(
          {vehicle.vehicle_id, split.train[i]->scene_id, "train", config.method,
           to_string(config.train_env),
           model_human_likeness(*model, train_samples[i])});
    }

    std::vector<double> test_hl;
    for (const Scene* scene : split.test) {
      const double hl =
          model_human_likeness(*model, samples.get(*scene, config.test_env));
      test_hl.push_back(hl);
      report.rows.push_back({vehicle.vehicle_id, scene->scene_id, "test",
                             config.method, env_name, hl});
    }
    summary.test_human_likeness = mean_of(test_hl);
    report.vehicles.push_back(summary);
  }
  return result;
}

std::string to_string(Baseline baseline) {
  return baseline == Baseline::kConstantVelocity ? "const_vel" : "idm_mobil";
}

Baseline baseline_from_string(const std::string& text) {
  if (text == "const_vel") return Baseline::kConstantVelocity;
  if (text == "idm_mobil") return Baseline::kIdmMobil;
  throw ConfigError("unknown baseline '" + text + "'");
}

EvalReport run_baseline(Baseline baseline,
                        std::span<const VehicleScenes> vehicles,
                        const SamplingConfig& config, std::uint64_t seed) {
  EvalReport report;
  const std::string method = to_string(baseline);
  for (const auto& vehicle : vehicles) {
    const auto split = split_vehicle(vehicle, seed);
    VehicleSummary summary;
    summary.vehicle_id = vehicle.vehicle_id;
    summary.method = method;
    summary.train_human_likeness = kNaN;
    summary.train_log_likelihood = kNaN;
    summary.test_scenes = split.test.size();
    std::vector<double> hl;
    for (const Scene* scene : split.test) {
      const auto traj = baseline == Baseline::kConstantVelocity
                            ? constant_velocity_predict(*scene)
                            : idm_mobil_predict(*scene, config.road,
                                                config.sim.forecast_idm,
                                                config.sim.forecast_mobil);
      hl.push_back(final_displacement(endpoint_of(traj), truth_of(*scene)));
      report.rows.push_back({vehicle.vehicle_id, scene->scene_id, "test",
                             method, "log", hl.back()});
    }
    summary.test_human_likeness = mean_of(hl);
    report.vehicles.push_back(summary);
  }
  return report;
}

TableResult run_tables(std::span<const VehicleScenes> vehicles,
                       SampleCache& samples, const TableOptions& options) {
  TableResult result;
  auto merge = [&](const std::string& section, EvalReport part) {
    for (auto& r : part.rows) r.method = section + "/" + r.method;
    for (auto& v : part.vehicles) v.method = section + "/" + v.method;
    auto& all = result.report;
    all.rows.insert(all.rows.end(), part.rows.begin(), part.rows.end());
    all.vehicles.insert(all.vehicles.end(), part.vehicles.begin(),
                        part.vehicles.end());
    for (const auto& w : part.warnings) {
      if (std::find(all.warnings.begin(), all.warnings.end(), w) ==
          all.warnings.end()) {
        all.warnings.push_back(w);
      }
    }
    auto summaries = aggregate(part);
    auto it = std::find_if(
        result.sections.begin(), result.sections.end(),
        [&](const TableSection& s) { return s.name == section; });
    if (it == result.sections.end()) {
      result.sections.push_back({section, {}});
      it = result.sections.end() - 1;
    }
    for (auto& m : summaries) {
      m.method = m.method.substr(section.size() + 1);
      it->methods.push_back(m);
    }
  };

  auto base_config = [&](ModelingMode modeling) {
    EvalConfig c;
    c.modeling = modeling;
    c.train = options.train;
    c.pool_vehicles = options.pool_vehicles;
    c.pool_scenes = options.pool_scenes;
    return c;
  };

  std::vector<ModelingMode> modes{ModelingMode::kPersonalized};
  if (options.general) modes.push_back(ModelingMode::kGeneral);
  for (auto modeling : modes) {
    const std::string section =
        modeling == ModelingMode::kPersonalized ? "personalized" : "general";

    auto proposed = base_config(modeling);
    auto run = run_experiment(proposed, vehicles, samples);
    merge(section, run.report);

    auto no_interaction = base_config(modeling);
    no_interaction.method = "without_interaction_awareness";
    no_interaction.use_interaction_feature = false;
    merge(section, run_experiment(no_interaction, vehicles, samples).report);

    auto no_reaction = base_config(modeling);
    no_reaction.method = "without_reactive_response";
    no_reaction.train_env = EnvMode::kFixedReplay;
    no_reaction.test_env = EnvMode::kFixedReplay;
    merge(section, run_experiment(no_reaction, vehicles, samples).report);

    if (options.forecast) {
      const std::string suffix =
          modeling == ModelingMode::kPersonalized ? "personalized" : "general";
      auto reused = base_config(modeling);
      reused.method = "proposed_" + suffix;
      reused.test_env = EnvMode::kForecast;
      merge("forecast",
            run_experiment(reused, vehicles, samples, &run.models).report);

      auto forecast = base_config(modeling);
      forecast.method = "forecasting_model_" + suffix;
      forecast.train_env = EnvMode::kForecast;
      forecast.test_env = EnvMode::kForecast;
      merge("forecast", run_experiment(forecast, vehicles, samples).report);
    }
  }

  if (options.baselines) {
    for (auto b : {Baseline::kIdmMobil, Baseline::kConstantVelocity}) {
      merge("baselines", run_baseline(b, vehicles, samples.config(),
                                      options.train.seed));
    }
  }
  // Table order: personalized, general, forecast, baselines.
  auto rank = [](const std::string& name) {
    static const std::vector<std::string> order{"personalized", "general",
                                                "forecast", "baselines"};
    return std::find(order.begin(), order.end(), name) - order.begin();
  };
  std::stable_sort(result.sections.begin(), result.sections.end(),
                   [&](const TableSection& a, const TableSection& b) {
                     return rank(a.name) < rank(b.name);
                   });
  return result;
}

}  // namespace irldrive
