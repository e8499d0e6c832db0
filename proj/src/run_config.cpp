#include "irldrive/run_config.hpp"

#include <cstdio>
#include <set>

#include "json.hpp"
#include "irldrive/errors.hpp"
#include "irldrive/io.hpp"

namespace irldrive {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown config key '" + where + "." + key + "'");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ordered_json idm_json(const IDMParams& p) {
  return {{"a_max", p.a_max}, {"tau", p.tau}, {"b", p.b},
          {"s0", p.s0},       {"delta", p.delta}};
}

void read_idm(const json& j, const std::string& where, IDMParams& p) {
  check_keys(j, where, {"a_max", "tau", "b", "s0", "delta"});
  read(j, "a_max", p.a_max);
  read(j, "tau", p.tau);
  read(j, "b", p.b);
  read(j, "s0", p.s0);
  read(j, "delta", p.delta);
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
}

void validate_idm(const IDMParams& p) {
  require_positive(p.a_max, "a_max");
  require_positive(p.tau, "tau");
  require_positive(p.b, "b");
  require_positive(p.s0, "s0");
  require_positive(p.delta, "delta");
}

}  // namespace

SamplingConfig RunConfig::sampling() const {
  SamplingConfig c;
  c.space = space;
  c.sim = sim;
  return c;
}

TrainOptions RunConfig::train_options() const {
  TrainOptions o = train;
  o.seed = seed;
  o.layout = ablate_interaction ? WeightLayout::without(kInteraction)
                                : WeightLayout::standard();
  return o;
}

void apply_config_json(RunConfig& c, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    check_keys(j, "config",
               {"seed", "ingest", "sampling", "environment", "training",
                "evaluation"});
    read(j, "seed", c.seed);
    if (j.contains("ingest")) {
      const auto& s = j.at("ingest");
      check_keys(s, "ingest", {"unit", "smoothing_window", "max_abs_accel"});
      if (s.contains("unit")) {
        const auto unit = s.at("unit").get<std::string>();
        if (unit != "feet" && unit != "meters") {
          throw ConfigError("ingest.unit must be 'feet' or 'meters'");
        }
        c.unit = unit == "feet" ? LengthUnit::kFeet : LengthUnit::kMeters;
      }
      if (s.contains("smoothing_window")) {
        const int w = s.at("smoothing_window").get<int>();
        if (w < 5 || w % 2 == 0) {
          throw ConfigError("ingest.smoothing_window must be odd and >= 5");
        }
        c.smoothing.half_window = w / 2;
      }
      read(s, "max_abs_accel", c.smoothing.max_abs_accel);
    }
    if (j.contains("sampling")) {
      const auto& s = j.at("sampling");
      check_keys(s, "sampling",
                 {"speed_half_range", "speed_step", "horizon", "stride",
                  "scenes_per_vehicle", "interaction_range"});
      read(s, "speed_half_range", c.space.speed_half_range);
      read(s, "speed_step", c.space.speed_step);
      read(s, "horizon", c.segment.horizon);
      read(s, "stride", c.segment.stride);
      read(s, "scenes_per_vehicle", c.segment.count);
      read(s, "interaction_range", c.segment.interaction_range);
      c.sim.interaction_range = c.segment.interaction_range;
    }
    if (j.contains("environment")) {
      const auto& s = j.at("environment");
      check_keys(s, "environment",
                 {"mode", "reaction_idm", "forecast_idm", "mobil",
                  "v0_tracks_current_speed", "wheelbase_ratio"});
      if (s.contains("mode")) {
        c.env_mode = env_mode_from_string(s.at("mode").get<std::string>());
      }
      if (s.contains("reaction_idm")) {
        read_idm(s.at("reaction_idm"), "environment.reaction_idm",
                 c.sim.reaction_idm);
      }
      if (s.contains("forecast_idm")) {
        read_idm(s.at("forecast_idm"), "environment.forecast_idm",
                 c.sim.forecast_idm);
      }
      if (s.contains("mobil")) {
        const auto& m = s.at("mobil");
        check_keys(m, "environment.mobil", {"b_safe", "politeness", "a_th"});
        read(m, "b_safe", c.sim.forecast_mobil.b_safe);
        read(m, "politeness", c.sim.forecast_mobil.politeness);
        read(m, "a_th", c.sim.forecast_mobil.a_th);
      }
      read(s, "v0_tracks_current_speed", c.sim.v0_tracks_current_speed);
      read(s, "wheelbase_ratio", c.sim.wheelbase_ratio);
    }
    if (j.contains("training")) {
      const auto& s = j.at("training");
      check_keys(s, "training",
                 {"lambda", "alpha", "epochs", "init_std",
                  "include_demo_in_partition", "ablate_interaction"});
      read(s, "lambda", c.train.lambda);
      read(s, "alpha", c.train.alpha);
      read(s, "epochs", c.train.epochs);
      read(s, "init_std", c.train.init_std);
      read(s, "include_demo_in_partition", c.train.include_demo_in_partition);
      read(s, "ablate_interaction", c.ablate_interaction);
    }
    if (j.contains("evaluation")) {
      const auto& s = j.at("evaluation");
      check_keys(s, "evaluation",
                 {"pool_vehicles", "pool_scenes", "max_vehicles"});
      read(s, "pool_vehicles", c.pool_vehicles);
      read(s, "pool_scenes", c.pool_scenes);
      read(s, "max_vehicles", c.max_vehicles);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") +
                      e.what());
  }
  validate(c);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  RunConfig c;
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError&) {
    throw ConfigError("cannot read config file " + path.string());
  }
  apply_config_json(c, text);
  return c;
}

std::string config_json(const RunConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["ingest"] = {{"unit", c.unit == LengthUnit::kFeet ? "feet" : "meters"},
                 {"smoothing_window", 2 * c.smoothing.half_window + 1},
                 {"max_abs_accel", c.smoothing.max_abs_accel}};
  j["sampling"] = {{"speed_half_range", c.space.speed_half_range},
                   {"speed_step", c.space.speed_step},
                   {"horizon", c.segment.horizon},
                   {"stride", c.segment.stride},
                   {"scenes_per_vehicle", c.segment.count},
                   {"interaction_range", c.segment.interaction_range}};
  j["environment"] = {
      {"mode", to_string(c.env_mode)},
      {"reaction_idm", idm_json(c.sim.reaction_idm)},
      {"forecast_idm", idm_json(c.sim.forecast_idm)},
      {"mobil",
       {{"b_safe", c.sim.forecast_mobil.b_safe},
        {"politeness", c.sim.forecast_mobil.politeness},
        {"a_th", c.sim.forecast_mobil.a_th}}},
      {"v0_tracks_current_speed", c.sim.v0_tracks_current_speed},
      {"wheelbase_ratio", c.sim.wheelbase_ratio}};
  j["training"] = {{"lambda", c.train.lambda},
                   {"alpha", c.train.alpha},
                   {"epochs", c.train.epochs},
                   {"init_std", c.train.init_std},
                   {"include_demo_in_partition",
                    c.train.include_demo_in_partition},
                   {"ablate_interaction", c.ablate_interaction}};
  j["evaluation"] = {{"pool_vehicles", c.pool_vehicles},
                     {"pool_scenes", c.pool_scenes},
                     {"max_vehicles", c.max_vehicles}};
  return j.dump();
}

std::string config_hash(const RunConfig& c) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char ch : config_json(c)) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

void validate(const RunConfig& c) {
  if (c.space.speed_half_range < 0.0) {
    throw ConfigError("speed_half_range must be >= 0");
  }
  require_positive(c.space.speed_step, "speed_step");
  require_positive(c.segment.horizon, "horizon");
  if (c.segment.stride < 0.0) throw ConfigError("stride must be >= 0");
  if (c.segment.count <= 0) throw ConfigError("scenes_per_vehicle must be > 0");
  require_positive(c.segment.interaction_range, "interaction_range");
  validate_idm(c.sim.reaction_idm);
  validate_idm(c.sim.forecast_idm);
  require_positive(c.sim.forecast_mobil.b_safe, "b_safe");
  require_positive(c.sim.wheelbase_ratio, "wheelbase_ratio");
  if (c.train.lambda < 0.0) throw ConfigError("lambda must be >= 0");
  require_positive(c.train.alpha, "alpha");
  if (c.train.epochs < 0) throw ConfigError("epochs must be >= 0");
  require_positive(c.train.init_std, "init_std");
  if (c.pool_vehicles == 0 || c.pool_scenes == 0 || c.max_vehicles == 0) {
    throw ConfigError("evaluation pool sizes must be positive");
  }
}

}  // namespace irldrive
