// irldrive: ingest NGSIM tracks, sample candidate buffers, train per-driver
// reward weights and evaluate them.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "irldrive/data_ingest.hpp"
#include "irldrive/errors.hpp"
#include "irldrive/evaluation.hpp"
#include "irldrive/io.hpp"
#include "irldrive/run_config.hpp"
#include "irldrive/sampling.hpp"
#include "irldrive/synthetic.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace irldrive {
namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

// Flags shared by every command that reads the run config.
struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> env_mode;
  std::optional<int> epochs;
  std::optional<double> lambda;
  std::optional<double> alpha;
  bool ablate_interaction = false;
  bool include_demo = false;
  std::optional<double> stride;
  std::optional<std::string> unit;

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (seed) c.seed = *seed;
    if (env_mode) c.env_mode = env_mode_from_string(*env_mode);
    if (epochs) c.train.epochs = *epochs;
    if (lambda) c.train.lambda = *lambda;
    if (alpha) c.train.alpha = *alpha;
    if (ablate_interaction) c.ablate_interaction = true;
    if (include_demo) c.train.include_demo_in_partition = true;
    if (stride) c.segment.stride = *stride;
    if (unit) {
      if (*unit != "feet" && *unit != "meters") {
        throw ConfigError("--unit must be 'feet' or 'meters'");
      }
      c.unit = *unit == "feet" ? LengthUnit::kFeet : LengthUnit::kMeters;
    }
    validate(c);
    return c;
  }
};

void add_config_flag(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON run config");
  cmd->add_option("--seed", f.seed, "Random seed");
}

void add_training_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--epochs", f.epochs, "Training epochs");
  cmd->add_option("--lambda", f.lambda, "L2 regularization weight");
  cmd->add_option("--alpha", f.alpha, "Adam step size");
  cmd->add_flag("--ablate-interaction-feature", f.ablate_interaction,
                "Pin the interaction weight to 0");
  cmd->add_flag("--include-demo", f.include_demo,
                "Add the demonstration to the partition set");
}

void add_env_flag(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--env-mode", f.env_mode,
                  "reactive_replay | fixed_replay | forecast");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir.string());
}

Dataset load_store(const std::string& path) {
  if (!fs::exists(path)) {
    throw DataError("track store " + path +
                    " not found; create it with `irldrive ingest`");
  }
  return read_track_store(fs::path(path));
}

std::vector<VehicleScenes> build_vehicles(const Dataset& dataset,
                                          const RunConfig& config,
                                          const std::vector<long>& selected,
                                          std::size_t limit) {
  std::vector<VehicleScenes> out;
  std::set<long> wanted(selected.begin(), selected.end());
  for (long id : selected) {
    if (!dataset.count(id)) {
      throw DataError("vehicle " + std::to_string(id) + " is not in the store");
    }
  }
  for (const auto& [id, track] : dataset) {
    if (!wanted.empty() && !wanted.count(id)) continue;
    if (out.size() >= limit) break;
    auto seg = segment_scenes(track, dataset, config.segment);
    try {
      split_sizes(seg.scenes.size());
    } catch (const ConfigError&) {
      std::cerr << "skipping vehicle " << id << ": only " << seg.scenes.size()
                << " scenes\n";
      continue;
    }
    out.push_back({id, std::move(seg.scenes)});
  }
  if (out.empty()) {
    throw ConfigError("no vehicle has enough scenes for a train/test split");
  }
  return out;
}

ordered_json summary_json(const std::vector<MethodSummary>& methods) {
  ordered_json j = ordered_json::object();
  auto num = [](double v) -> ordered_json {
    return std::isnan(v) ? ordered_json(nullptr) : ordered_json(v);
  };
  for (const auto& m : methods) {
    j[m.method] = {{"train_human_likeness", num(m.train_human_likeness)},
                   {"train_log_likelihood", num(m.train_log_likelihood)},
                   {"test_human_likeness", num(m.test_human_likeness)},
                   {"vehicles", m.vehicles}};
  }
  return j;
}

ordered_json vehicles_json(const std::vector<VehicleSummary>& rows) {
  ordered_json out = ordered_json::array();
  auto num = [](double v) -> ordered_json {
    return std::isnan(v) ? ordered_json(nullptr) : ordered_json(v);
  };
  for (const auto& v : rows) {
    out.push_back({{"vehicle_id", v.vehicle_id},
                   {"method", v.method},
                   {"train_human_likeness", num(v.train_human_likeness)},
                   {"train_log_likelihood", num(v.train_log_likelihood)},
                   {"test_human_likeness", num(v.test_human_likeness)},
                   {"train_scenes", v.train_scenes},
                   {"test_scenes", v.test_scenes}});
  }
  return out;
}

std::string rows_csv(const std::vector<SceneRow>& rows) {
  std::ostringstream ss;
  write_scene_rows(ss, rows);
  return ss.str();
}

// ---- ingest ---------------------------------------------------------------

struct IngestArgs {
  std::string input;
  std::string output;
  std::string report;
};

int cmd_ingest(const IngestArgs& args, const CommonFlags& flags) {
  const RunConfig config = flags.resolve();
  const Dataset raw = parse_ngsim_csv(fs::path(args.input), config.unit);
  Dataset smoothed;
  ordered_json rejected = ordered_json::array();
  std::size_t rows = 0;
  for (const auto& [id, track] : raw) {
    rows += track.states.size();
    try {
      smoothed.emplace(id, smooth_track(track, config.smoothing));
    } catch (const DataError& e) {
      rejected.push_back({{"vehicle_id", id}, {"reason", e.what()}});
    }
  }
  write_track_store(smoothed, fs::path(args.output),
                    store_format_for(args.output));

  ordered_json report;
  report["input_rows"] = rows;
  report["vehicles_read"] = raw.size();
  report["vehicles_kept"] = smoothed.size();
  report["rejected"] = rejected;
  report["unit"] = config.unit == LengthUnit::kFeet ? "feet" : "meters";
  report["seed"] = config.seed;
  report["config_hash"] = config_hash(config);
  const std::string report_path =
      args.report.empty() ? args.output + ".report.json" : args.report;
  write_file_atomic(report_path, report.dump(2) + "\n");
  std::cout << "ingested " << smoothed.size() << " of " << raw.size()
            << " vehicles into " << args.output << "\n";
  return kOk;
}

// ---- sample ---------------------------------------------------------------

struct SampleArgs {
  std::string store;
  std::string out_dir;
  std::vector<long> vehicles;
  std::size_t max_vehicles = 0;
};

fs::path buffer_path(const fs::path& dir, long vehicle_id) {
  return dir / ("vehicle_" + std::to_string(vehicle_id) + ".csv");
}

NormalizationConstants train_normalization(
    const std::vector<BufferScene>& scenes) {
  std::vector<SceneSample> train;
  for (const auto& s : scenes) {
    if (s.split == "train") train.push_back(s.sample);
  }
  return fit_normalization(std::span<const SceneSample>(train));
}

int cmd_sample(const SampleArgs& args, const CommonFlags& flags) {
  const RunConfig config = flags.resolve();
  const Dataset dataset = load_store(args.store);
  const fs::path dir(args.out_dir);
  ensure_dir(dir);
  const std::size_t limit =
      args.max_vehicles ? args.max_vehicles : dataset.size();
  const auto vehicles = build_vehicles(dataset, config, args.vehicles, limit);
  const SamplingConfig sampling = config.sampling();

  for (const auto& v : vehicles) {
    const auto path = buffer_path(dir, v.vehicle_id);
    const auto meta_path = sidecar_path(path);
    const auto split = split_scenes(v.scenes.size(), config.seed);
    std::vector<std::size_t> wanted = split.train;
    wanted.insert(wanted.end(), split.test.begin(), split.test.end());
    std::sort(wanted.begin(), wanted.end());
    const std::set<std::size_t> train_set(split.train.begin(), split.train.end());

    std::vector<BufferScene> done;
    if (fs::exists(path)) {
      if (fs::exists(meta_path)) {
        const auto meta = read_buffer_meta(meta_path);
        if (meta.env_mode != config.env_mode) {
          throw ConfigError("buffer " + path.string() + " was sampled in " +
                            to_string(meta.env_mode) +
                            " mode; use a different output directory");
        }
      }
      done = read_buffer(path);
    }
    std::set<std::string> complete;
    for (const auto& s : done) complete.insert(s.sample.scene_id);

    bool all_done = fs::exists(meta_path);
    for (std::size_t i : wanted) {
      all_done = all_done && complete.count(v.scenes[i].scene_id);
    }
    if (all_done) {
      std::cout << "vehicle " << v.vehicle_id << ": buffer complete\n";
      continue;
    }

    // Rewrite the complete scenes, then append the missing ones one by one
    // so an interrupted run loses at most the scene in progress.
    {
      std::ostringstream head;
      head << buffer_header() << '\n';
      for (const auto& s : done) write_buffer_scene(head, s);
      write_file_atomic(path, head.str());
    }
    std::ofstream out(path, std::ios::app | std::ios::binary);
    for (std::size_t i : wanted) {
      const auto& scene = v.scenes[i];
      if (complete.count(scene.scene_id)) continue;
      BufferScene b;
      b.split = train_set.count(i) ? "train" : "test";
      b.sample = sample_scene(scene, config.env_mode, sampling);
      write_buffer_scene(out, b);
      out.flush();
      done.push_back(std::move(b));
    }
    out.close();

    // Keep file order equal to scene order regardless of resume history.
    std::map<std::string, std::size_t> order;
    for (std::size_t i : wanted) order[v.scenes[i].scene_id] = i;
    std::stable_sort(done.begin(), done.end(),
                     [&](const BufferScene& a, const BufferScene& b) {
                       return order[a.sample.scene_id] < order[b.sample.scene_id];
                     });
    std::ostringstream all;
    all << buffer_header() << '\n';
    for (const auto& s : done) write_buffer_scene(all, s);
    write_file_atomic(path, all.str());

    BufferMeta meta;
    meta.vehicle_id = v.vehicle_id;
    meta.env_mode = config.env_mode;
    meta.scenes = done.size();
    meta.normalization = train_normalization(done);
    write_buffer_meta(meta_path, meta);
    std::cout << "vehicle " << v.vehicle_id << ": " << done.size()
              << " scenes -> " << path.string() << "\n";
  }
  return kOk;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::vector<std::string> buffers;
  std::string model;
  std::string report;
};

std::vector<BufferScene> load_buffer(const std::string& path) {
  if (!fs::exists(path)) {
    throw DataError("buffer " + path +
                    " not found; create it with `irldrive sample`");
  }
  return read_buffer(fs::path(path));
}

int cmd_train(const TrainArgs& args, const CommonFlags& flags) {
  const RunConfig config = flags.resolve();
  const bool pooled = args.buffers.size() > 1;

  std::vector<SceneSample> train_samples;
  std::vector<long> vehicles;
  std::optional<EnvMode> env;
  NormalizationConstants normalization;
  for (const auto& path : args.buffers) {
    const auto scenes = load_buffer(path);
    const auto meta = read_buffer_meta(sidecar_path(path));
    if (env && *env != meta.env_mode) {
      throw ConfigError("buffers were sampled in different environment modes");
    }
    env = meta.env_mode;
    vehicles.push_back(meta.vehicle_id);
    normalization = meta.normalization;
    for (const auto& s : scenes) {
      if (s.split == "train") train_samples.push_back(s.sample);
    }
  }
  if (train_samples.empty()) {
    throw DataError("no training scenes in the given buffers");
  }
  if (pooled) {
    normalization =
        fit_normalization(std::span<const SceneSample>(train_samples));
  }

  const TrainOptions options = config.train_options();
  const auto entries = to_entries(train_samples, normalization);
  const auto report = train(entries, options);

  ModelFile model;
  model.theta = report.theta;
  model.layout = options.layout;
  model.options = options;
  model.normalization = normalization;
  model.pooled = pooled;
  model.env_mode = *env;
  model.vehicles = vehicles;
  model.config_hash = config_hash(config);
  write_model(args.model, model);

  std::ostringstream csv;
  write_train_report(csv, report);
  const std::string report_path =
      args.report.empty() ? fs::path(args.model).replace_extension(".train.csv").string()
                          : args.report;
  write_file_atomic(report_path, csv.str());

  const auto& last = report.epochs.back();
  std::cout << "trained on " << entries.size() << " scenes, objective "
            << format_double(last.objective) << ", model " << args.model
            << "\n";
  return kOk;
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string model;
  std::string buffer;
  std::string store;
  std::vector<long> vehicles;
  std::string baseline;
  std::string out_dir;
};

void write_eval_outputs(const fs::path& dir, const EvalReport& report,
                        const RunConfig& config, const std::string& kind) {
  ensure_dir(dir);
  write_file_atomic(dir / "eval_rows.csv", rows_csv(report.rows));
  ordered_json j;
  j["kind"] = kind;
  j["seed"] = config.seed;
  j["config_hash"] = config_hash(config);
  j["methods"] = summary_json(aggregate(report));
  j["vehicles"] = vehicles_json(report.vehicles);
  j["warnings"] = report.warnings;
  write_file_atomic(dir / "eval_summary.json", j.dump(2) + "\n");
}

int cmd_eval(const EvalArgs& args, const CommonFlags& flags) {
  const RunConfig config = flags.resolve();
  const fs::path dir(args.out_dir);

  if (!args.model.empty()) {
    if (args.buffer.empty()) throw ConfigError("--model needs --buffer");
    const ModelFile file = read_model(args.model);
    const auto scenes = load_buffer(args.buffer);
    const auto meta = read_buffer_meta(sidecar_path(args.buffer));
    if (!file.pooled && file.normalization.id() != meta.normalization.id()) {
      throw DataError("model normalization " + file.normalization.id() +
                      " does not match buffer normalization " +
                      meta.normalization.id() +
                      "; retrain the model on this buffer");
    }
    if (flags.env_mode && config.env_mode != meta.env_mode) {
      throw ConfigError("buffer was sampled in " + to_string(meta.env_mode) +
                        " mode; resample it to evaluate in " +
                        to_string(config.env_mode));
    }
    if (flags.ablate_interaction && file.layout.learnable[kInteraction]) {
      throw ConfigError("--ablate-interaction-feature needs a model trained "
                        "with the interaction weight pinned");
    }
    TrainedModel model;
    model.theta = file.theta;
    model.layout = file.layout;
    model.normalization = file.normalization;
    model.pooled = file.pooled;

    EvalReport report;
    VehicleSummary summary;
    summary.vehicle_id = meta.vehicle_id;
    summary.method = "model";
    std::vector<double> train_hl, test_hl;
    std::vector<SceneEntry> train_entries;
    for (const auto& s : scenes) {
      const double hl = model_human_likeness(model, s.sample);
      (s.split == "train" ? train_hl : test_hl).push_back(hl);
      if (s.split == "train") {
        train_entries.push_back(to_entry(s.sample, model.normalization));
      }
      report.rows.push_back({meta.vehicle_id, s.sample.scene_id, s.split,
                             "model", to_string(meta.env_mode), hl});
    }
    auto mean = [](const std::vector<double>& v) {
      double sum = 0.0;
      for (double x : v) sum += x;
      return v.empty() ? std::nan("") : sum / static_cast<double>(v.size());
    };
    summary.train_human_likeness = mean(train_hl);
    summary.test_human_likeness = mean(test_hl);
    double ll = 0.0;
    for (const auto& e : train_entries) {
      ll += log_likelihood(model.theta, e,
                           file.options.include_demo_in_partition);
    }
    summary.train_log_likelihood =
        train_entries.empty() ? std::nan("")
                              : ll / static_cast<double>(train_entries.size());
    summary.train_scenes = train_hl.size();
    summary.test_scenes = test_hl.size();
    report.vehicles.push_back(summary);
    write_eval_outputs(dir, report, config, "model");
    std::cout << "test human likeness " << format_double(summary.test_human_likeness)
              << " m over " << test_hl.size() << " scenes\n";
    return kOk;
  }

  if (args.store.empty()) {
    throw ConfigError("eval needs --model/--buffer or --store");
  }
  const Dataset dataset = load_store(args.store);
  const auto vehicles = build_vehicles(dataset, config, args.vehicles,
                                       config.max_vehicles);
  EvalReport report;
  std::string kind;
  if (!args.baseline.empty()) {
    const Baseline b = baseline_from_string(args.baseline);
    report = run_baseline(b, vehicles, config.sampling(), config.seed);
    kind = "baseline";
  } else {
    SampleCache cache(config.sampling());
    EvalConfig eval;
    eval.method = config.ablate_interaction ? "without_interaction_awareness"
                                            : "proposed";
    eval.train_env = config.env_mode;
    eval.test_env = config.env_mode;
    eval.use_interaction_feature = !config.ablate_interaction;
    eval.train = config.train_options();
    report = run_experiment(eval, vehicles, cache).report;
    kind = "personalized";
  }
  write_eval_outputs(dir, report, config, kind);
  for (const auto& m : aggregate(report)) {
    std::cout << m.method << ": test human likeness "
              << format_double(m.test_human_likeness) << " m over "
              << m.vehicles << " vehicles\n";
  }
  return kOk;
}

// ---- experiment -----------------------------------------------------------

struct ExperimentArgs {
  std::string store;
  std::string out_dir;
  std::size_t max_vehicles = 0;
  bool no_general = false;
  bool no_forecast = false;
  bool no_baselines = false;
};

int cmd_experiment(const ExperimentArgs& args, const CommonFlags& flags) {
  RunConfig config = flags.resolve();
  if (args.max_vehicles) config.max_vehicles = args.max_vehicles;
  const Dataset dataset = load_store(args.store);
  const auto vehicles = build_vehicles(dataset, config, {}, config.max_vehicles);

  TableOptions options;
  options.train = config.train_options();
  options.pool_vehicles = config.pool_vehicles;
  options.pool_scenes = config.pool_scenes;
  options.general = !args.no_general;
  options.forecast = !args.no_forecast;
  options.baselines = !args.no_baselines;
  SampleCache cache(config.sampling());
  const auto result = run_tables(vehicles, cache, options);

  const fs::path dir(args.out_dir);
  ensure_dir(dir);
  ordered_json j;
  j["seed"] = config.seed;
  j["config_hash"] = config_hash(config);
  j["vehicles"] = vehicles.size();
  for (const auto& section : result.sections) {
    j[section.name] = summary_json(section.methods);
  }
  if (options.forecast) {
    j["notes"] = {"forecast proposed_* rows reuse the log-replay models and "
                  "report no training metrics"};
  }
  j["warnings"] = result.report.warnings;
  write_file_atomic(dir / "tables.json", j.dump(2) + "\n");
  write_file_atomic(dir / "table_rows.csv", rows_csv(result.report.rows));
  ordered_json per_vehicle;
  per_vehicle["vehicles"] = vehicles_json(result.report.vehicles);
  write_file_atomic(dir / "table_vehicles.json", per_vehicle.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return kOk;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string output;
  SyntheticTrafficOptions options;
  bool no_lane_changes = false;
};

int cmd_synth(SynthArgs args) {
  args.options.lane_changes = !args.no_lane_changes;
  if (args.options.vehicles <= 0 || args.options.seconds <= 0.0) {
    throw ConfigError("--vehicles and --seconds must be positive");
  }
  std::ostringstream ss;
  write_synthetic_ngsim(ss, args.options);
  write_file_atomic(args.output, ss.str());
  std::cout << "wrote " << args.options.vehicles << " synthetic vehicles to "
            << args.output << "\n";
  return kOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Per-driver reward learning from highway trajectories"};
  app.require_subcommand(1);
  CommonFlags flags;

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Parse and smooth an NGSIM CSV");
  c_ingest->add_option("--input", ingest.input, "NGSIM CSV")->required();
  c_ingest->add_option("--output", ingest.output, "Track store (.csv or .jsonl)")
      ->required();
  c_ingest->add_option("--report", ingest.report, "Ingestion report JSON");
  c_ingest->add_option("--unit", flags.unit, "feet | meters");
  add_config_flag(c_ingest, flags);

  SampleArgs sample;
  auto* c_sample = app.add_subcommand("sample", "Build per-vehicle buffers");
  c_sample->add_option("--store", sample.store, "Track store")->required();
  c_sample->add_option("--out-dir", sample.out_dir, "Buffer directory")
      ->required();
  c_sample->add_option("--vehicle", sample.vehicles, "Vehicle ids");
  c_sample->add_option("--max-vehicles", sample.max_vehicles,
                       "Use the first N vehicles");
  c_sample->add_option("--stride", flags.stride, "Scene window spacing (s)");
  add_env_flag(c_sample, flags);
  add_config_flag(c_sample, flags);

  TrainArgs train_args;
  auto* c_train = app.add_subcommand("train", "Learn reward weights");
  c_train->add_option("--buffer", train_args.buffers,
                      "Buffer CSV (several for a pooled model)")
      ->required();
  c_train->add_option("--model", train_args.model, "Output model JSON")
      ->required();
  c_train->add_option("--report", train_args.report, "Training report CSV");
  add_training_flags(c_train, flags);
  add_config_flag(c_train, flags);

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Score models or baselines");
  c_eval->add_option("--model", eval.model, "Model JSON");
  c_eval->add_option("--buffer", eval.buffer, "Buffer CSV scored by --model");
  c_eval->add_option("--store", eval.store, "Track store");
  c_eval->add_option("--vehicle", eval.vehicles, "Vehicle ids");
  c_eval->add_option("--baseline", eval.baseline, "idm_mobil | const_vel");
  c_eval->add_option("--out-dir", eval.out_dir, "Report directory")->required();
  c_eval->add_option("--stride", flags.stride, "Scene window spacing (s)");
  add_env_flag(c_eval, flags);
  add_training_flags(c_eval, flags);
  add_config_flag(c_eval, flags);

  ExperimentArgs experiment;
  auto* c_exp = app.add_subcommand("experiment", "Run all comparison tables");
  c_exp->add_option("--store", experiment.store, "Track store")->required();
  c_exp->add_option("--out-dir", experiment.out_dir, "Report directory")
      ->required();
  c_exp->add_option("--max-vehicles", experiment.max_vehicles,
                    "Use the first N vehicles");
  c_exp->add_flag("--no-general", experiment.no_general);
  c_exp->add_flag("--no-forecast", experiment.no_forecast);
  c_exp->add_flag("--no-baselines", experiment.no_baselines);
  c_exp->add_option("--stride", flags.stride, "Scene window spacing (s)");
  c_exp->add_option("--epochs", flags.epochs, "Training epochs");
  add_config_flag(c_exp, flags);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write synthetic NGSIM traffic");
  c_synth->add_option("--output", synth.output, "CSV path")->required();
  c_synth->add_option("--vehicles", synth.options.vehicles, "Vehicle count");
  c_synth->add_option("--seconds", synth.options.seconds, "Duration");
  c_synth->add_option("--seed", synth.options.seed, "Random seed");
  c_synth->add_option("--speed-wave", synth.options.speed_wave,
                      "Speed oscillation amplitude (m/s)");
  c_synth->add_flag("--no-lane-changes", synth.no_lane_changes);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (c_ingest->parsed()) return cmd_ingest(ingest, flags);
  if (c_sample->parsed()) return cmd_sample(sample, flags);
  if (c_train->parsed()) return cmd_train(train_args, flags);
  if (c_eval->parsed()) return cmd_eval(eval, flags);
  if (c_exp->parsed()) return cmd_experiment(experiment, flags);
  if (c_synth->parsed()) return cmd_synth(synth);
  return kUsage;
}

}  // namespace
}  // namespace irldrive

int main(int argc, char** argv) {
  using namespace irldrive;
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const SchemaError& e) {
    std::cerr << "schema error (column " << e.column() << "): " << e.what()
              << "\n";
    return kData;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
}
