#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "irldrive/data_ingest.hpp"
#include "irldrive/io.hpp"
#include "support/cli_runner.hpp"

using namespace irldrive;
using irldrive::test::quote;
using irldrive::test::run_cli;
using irldrive::test::slurp;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path root() {
  static const fs::path dir = [] {
    auto p = fs::temp_directory_path() / "irldrive_cli_tests";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

test::CommandResult cli(const std::string& args) {
  return run_cli(args, root());
}

// Straight-lane traffic: 6 vehicles over 60 s, no lane changes.
struct Workspace {
  fs::path csv, store, config, buffers;
};

const Workspace& workspace() {
  static const Workspace w = [] {
    Workspace w;
    w.csv = root() / "traffic.csv";
    w.store = root() / "store.csv";
    w.config = root() / "config.json";
    w.buffers = root() / "buffers";
    auto r = cli("synth --output " + quote(w.csv) +
                 " --vehicles 6 --seconds 60 --seed 3 --no-lane-changes");
    REQUIRE(r.exit_code == 0);
    r = cli("ingest --input " + quote(w.csv) + " --output " + quote(w.store));
    REQUIRE(r.exit_code == 0);
    std::ofstream(w.config)
        << R"({"sampling": {"scenes_per_vehicle": 35, "stride": 1.0}})";
    r = cli("sample --store " + quote(w.store) + " --out-dir " +
            quote(w.buffers) + " --vehicle 3 --config " + quote(w.config));
    REQUIRE(r.exit_code == 0);
    return w;
  }();
  return w;
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(cli("").exit_code == 1);
  CHECK(cli("frobnicate").exit_code == 1);
  CHECK(cli("train --model x.json").exit_code == 1);
  CHECK(cli("ingest --input a.csv --output b.csv --unit furlongs").exit_code ==
        1);
}

TEST_CASE("ingest writes a store and a report") {
  const auto& w = workspace();
  CHECK(fs::exists(w.store));
  const auto report = read_json(fs::path(w.store.string() + ".report.json"));
  CHECK(report["vehicles_read"] == 6);
  CHECK(report["vehicles_kept"] == 6);
  CHECK(report["rejected"].empty());
  CHECK(report["unit"] == "feet");
  CHECK(report["input_rows"] == 6 * 601);
  CHECK(read_track_store(w.store).size() == 6);
}

TEST_CASE("ingest names a missing column and exits 2") {
  const auto& w = workspace();
  std::ifstream in(w.csv);
  std::string header, line, text;
  std::getline(in, header);
  const auto pos = header.find("Lane_ID");
  REQUIRE(pos != std::string::npos);
  header.replace(pos, 7, "Lane");
  text = header + "\n";
  while (std::getline(in, line)) text += line + "\n";
  const auto bad = root() / "bad_column.csv";
  std::ofstream(bad) << text;
  const auto r = cli("ingest --input " + quote(bad) + " --output " +
                     quote(root() / "bad_store.csv"));
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("Lane_ID") != std::string::npos);
  CHECK_FALSE(fs::exists(root() / "bad_store.csv"));
}

TEST_CASE("the unit flag scales positions by 0.3048") {
  const auto& w = workspace();
  const auto meters = root() / "store_meters.csv";
  const auto r = cli("ingest --input " + quote(w.csv) + " --output " +
                     quote(meters) + " --unit meters");
  REQUIRE(r.exit_code == 0);
  const auto feet_data = read_track_store(w.store);
  const auto meter_data = read_track_store(meters);
  REQUIRE(feet_data.size() == meter_data.size());
  int compared = 0;
  for (const auto& [id, track] : feet_data) {
    const auto& other = meter_data.at(id);
    REQUIRE(track.states.size() == other.states.size());
    for (std::size_t i = 0; i < track.states.size(); i += 50) {
      const double x_ft = track.states[i].x, x_m = other.states[i].x;
      CHECK(std::abs(x_m * 0.3048 - x_ft) <= 1e-5 * std::max(1.0, x_ft));
      CHECK(std::abs(other.states[i].y * 0.3048 - track.states[i].y) <= 1e-5);
      ++compared;
    }
  }
  CHECK(compared > 0);
}

TEST_CASE("sample writes 35 scenes of candidates plus demonstrations") {
  const auto& w = workspace();
  const auto buffer = w.buffers / "vehicle_3.csv";
  const auto scenes = read_buffer(buffer);
  REQUIRE(scenes.size() == 35);
  std::size_t candidates = 0;
  for (const auto& s : scenes) candidates += s.sample.candidates.size();
  CHECK(candidates == 35 * 33);
  int lines = 0, train = 0;
  std::ifstream in(buffer);
  std::string line;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1 + 35 * 33 + 35);
  for (const auto& s : scenes) train += s.split == "train";
  CHECK(train == 25);

  const auto meta = read_buffer_meta(sidecar_path(buffer));
  CHECK(meta.vehicle_id == 3);
  CHECK(meta.scenes == 35);
  CHECK(meta.env_mode == EnvMode::kReactiveReplay);
}

TEST_CASE("resampling a complete buffer is a no-op") {
  const auto& w = workspace();
  const auto buffer = w.buffers / "vehicle_3.csv";
  const auto before = slurp(buffer);
  const auto r = cli("sample --store " + quote(w.store) + " --out-dir " +
                     quote(w.buffers) + " --vehicle 3 --config " +
                     quote(w.config));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("buffer complete") != std::string::npos);
  CHECK(slurp(buffer) == before);
}

TEST_CASE("an interrupted buffer resumes to the same bytes") {
  const auto& w = workspace();
  const auto dir = root() / "resume";
  fs::create_directories(dir);
  const auto full = slurp(w.buffers / "vehicle_3.csv");
  // Keep the header, ten complete scenes and half of the eleventh.
  std::size_t cut = 0;
  for (int n = 0; n < 1 + 10 * 34 + 17; ++n) cut = full.find('\n', cut) + 1;
  std::ofstream(dir / "vehicle_3.csv", std::ios::binary) << full.substr(0, cut);
  const auto r = cli("sample --store " + quote(w.store) + " --out-dir " +
                     quote(dir) + " --vehicle 3 --config " + quote(w.config));
  CHECK(r.exit_code == 0);
  CHECK(slurp(dir / "vehicle_3.csv") == full);
}

TEST_CASE("the environment mode is recorded and enforced") {
  const auto& w = workspace();
  const auto dir = root() / "fixed";
  auto r = cli("sample --store " + quote(w.store) + " --out-dir " + quote(dir) +
               " --vehicle 1 --env-mode fixed_replay");
  REQUIRE(r.exit_code == 0);
  const auto meta = read_json(dir / "vehicle_1.norm.json");
  CHECK(meta["env_mode"] == "fixed_replay");

  r = cli("sample --store " + quote(w.store) + " --out-dir " + quote(dir) +
          " --vehicle 1 --env-mode reactive_replay");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("fixed_replay") != std::string::npos);

  r = cli("sample --store " + quote(w.store) + " --out-dir " + quote(dir) +
          " --vehicle 1 --env-mode sideways");
  CHECK(r.exit_code == 1);
}

TEST_CASE("train writes eight named weights with collision pinned") {
  const auto& w = workspace();
  const auto model = root() / "model_a.json";
  const auto r = cli("train --buffer " + quote(w.buffers / "vehicle_3.csv") +
                     " --model " + quote(model) + " --epochs 50 --seed 11");
  REQUIRE(r.exit_code == 0);
  const auto j = read_json(model);
  REQUIRE(j["weights"].size() == kFeatureCount);
  for (auto name : feature_names()) {
    CHECK(j["weights"].contains(std::string(name)));
  }
  CHECK(j["weights"]["collision"] == -10.0);
  CHECK(j["seed"] == 11);
  CHECK(j["env_mode"] == "reactive_replay");
  CHECK(j["normalization"]["id"] ==
        read_json(w.buffers / "vehicle_3.norm.json")["normalization"]["id"]);

  const auto report = slurp(root() / "model_a.train.csv");
  int lines = 0;
  for (char c : report) lines += c == '\n';
  CHECK(lines == 1 + 51);
}

TEST_CASE("training is byte-identical for a fixed seed") {
  const auto& w = workspace();
  const auto buffer = quote(w.buffers / "vehicle_3.csv");
  for (const char* name : {"det_1", "det_2"}) {
    const auto r = cli("train --buffer " + buffer + " --model " +
                       quote(root() / (std::string(name) + ".json")) +
                       " --epochs 30 --seed 5");
    REQUIRE(r.exit_code == 0);
  }
  CHECK(slurp(root() / "det_1.json") == slurp(root() / "det_2.json"));
  CHECK(slurp(root() / "det_1.train.csv") == slurp(root() / "det_2.train.csv"));

  const auto r = cli("train --buffer " + buffer + " --model " +
                     quote(root() / "det_3.json") + " --epochs 30 --seed 6");
  REQUIRE(r.exit_code == 0);
  CHECK(slurp(root() / "det_3.json") != slurp(root() / "det_1.json"));
}

TEST_CASE("zero epochs returns the initialization") {
  const auto& w = workspace();
  const auto model = root() / "init.json";
  const auto r = cli("train --buffer " + quote(w.buffers / "vehicle_3.csv") +
                     " --model " + quote(model) + " --epochs 0 --seed 9");
  REQUIRE(r.exit_code == 0);
  TrainOptions options;
  options.seed = 9;
  const auto init = initial_weights(options);
  const auto back = read_model(model);
  CHECK(back.theta == init);
}

TEST_CASE("eval scores a buffer and guards the normalization") {
  const auto& w = workspace();
  const auto model = root() / "guard_model.json";
  auto r = cli("train --buffer " + quote(w.buffers / "vehicle_3.csv") +
               " --model " + quote(model) + " --epochs 20");
  REQUIRE(r.exit_code == 0);

  const auto out = root() / "eval_model";
  r = cli("eval --model " + quote(model) + " --buffer " +
          quote(w.buffers / "vehicle_3.csv") + " --out-dir " + quote(out));
  REQUIRE(r.exit_code == 0);
  const auto summary = read_json(out / "eval_summary.json");
  CHECK(summary["kind"] == "model");
  const double hl = summary["methods"]["model"]["test_human_likeness"];
  CHECK(std::isfinite(hl));
  CHECK(hl >= 0.0);

  r = cli("sample --store " + quote(w.store) + " --out-dir " +
          quote(w.buffers) + " --vehicle 2");
  REQUIRE(r.exit_code == 0);
  r = cli("eval --model " + quote(model) + " --buffer " +
          quote(w.buffers / "vehicle_2.csv") + " --out-dir " +
          quote(root() / "eval_guard"));
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("normalization") != std::string::npos);
}

TEST_CASE("the constant-velocity baseline matches straight cruising") {
  const auto csv = root() / "steady.csv";
  const auto store = root() / "steady.jsonl";
  auto r = cli("synth --output " + quote(csv) +
               " --vehicles 3 --seconds 20 --seed 4 --speed-wave 0 "
               "--no-lane-changes");
  REQUIRE(r.exit_code == 0);
  r = cli("ingest --input " + quote(csv) + " --output " + quote(store));
  REQUIRE(r.exit_code == 0);
  const auto out = root() / "eval_const";
  r = cli("eval --store " + quote(store) + " --baseline const_vel --out-dir " +
          quote(out));
  REQUIRE(r.exit_code == 0);
  const auto summary = read_json(out / "eval_summary.json");
  CHECK(summary["kind"] == "baseline");
  REQUIRE(summary["methods"].size() == 1);
  for (const auto& [name, m] : summary["methods"].items()) {
    CHECK(m["vehicles"] == 3);
    CHECK(m["test_human_likeness"].get<double>() < 1e-3);
  }
}

TEST_CASE("experiment writes the method rows deterministically") {
  const auto& w = workspace();
  const std::string args = " --max-vehicles 2 --epochs 10 --no-general "
                           "--no-forecast --no-baselines --stride 5";
  auto r = cli("experiment --store " + quote(w.store) + " --out-dir " +
               quote(root() / "exp_1") + args);
  REQUIRE(r.exit_code == 0);
  r = cli("experiment --store " + quote(w.store) + " --out-dir " +
          quote(root() / "exp_2") + args);
  REQUIRE(r.exit_code == 0);
  const auto tables = read_json(root() / "exp_1" / "tables.json");
  REQUIRE(tables.contains("personalized"));
  const auto& rows = tables["personalized"];
  CHECK(rows.contains("proposed"));
  CHECK(rows.contains("without_interaction_awareness"));
  CHECK(rows.contains("without_reactive_response"));
  CHECK(tables["vehicles"] == 2);
  for (const char* file : {"tables.json", "table_rows.csv",
                           "table_vehicles.json"}) {
    CHECK(slurp(root() / "exp_1" / file) == slurp(root() / "exp_2" / file));
  }
}

TEST_CASE("data and numeric failures map to exit codes 2 and 3") {
  const auto& w = workspace();
  auto r = cli("sample --store " + quote(root() / "missing.csv") +
               " --out-dir " + quote(root() / "none"));
  CHECK(r.exit_code == 2);
  r = cli("train --buffer " + quote(root() / "missing_buffer.csv") +
          " --model " + quote(root() / "m.json"));
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("irldrive sample") != std::string::npos);

  const auto bad_config = root() / "bad_config.json";
  std::ofstream(bad_config) << R"({"training": {"alpha": -1}})";
  r = cli("train --buffer " + quote(w.buffers / "vehicle_3.csv") +
          " --model " + quote(root() / "m.json") + " --config " +
          quote(bad_config));
  CHECK(r.exit_code == 1);

  // A buffer with an infinite feature makes the objective non-finite.
  const auto dir = root() / "nonfinite";
  fs::create_directories(dir);
  auto scenes = read_buffer(w.buffers / "vehicle_3.csv");
  for (auto& s : scenes) s.sample.candidates[0][0] = INFINITY;
  std::ofstream out(dir / "vehicle_3.csv");
  out << buffer_header() << '\n';
  for (const auto& s : scenes) write_buffer_scene(out, s);
  out.close();
  fs::copy_file(w.buffers / "vehicle_3.norm.json", dir / "vehicle_3.norm.json",
                fs::copy_options::overwrite_existing);
  r = cli("train --buffer " + quote(dir / "vehicle_3.csv") + " --model " +
          quote(dir / "m.json") + " --epochs 2");
  CHECK(r.exit_code == 3);
}
