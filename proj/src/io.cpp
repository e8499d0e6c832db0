#include "irldrive/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "irldrive/errors.hpp"

namespace irldrive {
namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SchemaError("buffer", "line " + std::to_string(line_no) +
                                    ": bad number '" + s + "'");
  }
}

std::string full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

ordered_json normalization_json(const NormalizationConstants& c) {
  ordered_json j;
  j["divisors"] = c.divisors;
  j["id"] = c.id();
  return j;
}

NormalizationConstants normalization_from(const nlohmann::json& j) {
  NormalizationConstants c;
  const auto divisors = j.at("divisors").get<std::vector<double>>();
  if (divisors.size() != kFeatureCount) {
    throw SchemaError("divisors", "expected " + std::to_string(kFeatureCount) +
                                      " normalization divisors");
  }
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (!(divisors[i] > 0.0)) {
      throw SchemaError("divisors", "normalization divisors must be positive");
    }
    c.divisors[i] = divisors[i];
  }
  if (j.contains("id") && j.at("id").get<std::string>() != c.id()) {
    throw SchemaError("id", "normalization id does not match its divisors");
  }
  return c;
}

nlohmann::json parse_json_file(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("json", path.string() + ": " + e.what());
  }
}

}  // namespace

std::string buffer_header() {
  std::string h = "scene_id,split,candidate_id,is_demo";
  for (auto name : feature_names()) h += "," + std::string(name);
  return h + ",end_x,end_y";
}

void write_buffer_scene(std::ostream& out, const BufferScene& scene) {
  const auto& s = scene.sample;
  auto row = [&](long id, bool demo, const FeatureVector& f, Point2 end) {
    out << s.scene_id << ',' << scene.split << ',' << id << ','
        << (demo ? 1 : 0);
    for (double v : f) out << ',' << full(v);
    out << ',' << full(end.x) << ',' << full(end.y) << '\n';
  };
  for (std::size_t i = 0; i < s.candidates.size(); ++i) {
    row(static_cast<long>(i), false, s.candidates[i], s.endpoints[i]);
  }
  row(-1, true, s.demo, s.truth);
}

std::vector<BufferScene> read_buffer(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaError("scene_id", "empty buffer: no header row");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != buffer_header()) {
    throw SchemaError("header", "unexpected buffer header '" + line + "'");
  }
  std::vector<BufferScene> scenes;
  BufferScene current;
  bool open = false;
  std::size_t line_no = 1;
  const std::size_t columns = 4 + kFeatureCount + 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != columns) {
      throw SchemaError("buffer", "line " + std::to_string(line_no) + ": " +
                                      std::to_string(f.size()) +
                                      " fields, expected " +
                                      std::to_string(columns));
    }
    if (open && f[0] != current.sample.scene_id) {
      open = false;  // previous scene never got its demonstration row
    }
    if (!open) {
      current = {};
      current.sample.scene_id = f[0];
      current.split = f[1];
      open = true;
    }
    FeatureVector features{};
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      features[i] = to_double(f[4 + i], line_no);
    }
    const Point2 end{to_double(f[4 + kFeatureCount], line_no),
                     to_double(f[5 + kFeatureCount], line_no)};
    if (f[3] == "1") {
      current.sample.demo = features;
      current.sample.truth = end;
      scenes.push_back(std::move(current));
      open = false;
    } else {
      current.sample.candidates.push_back(features);
      current.sample.endpoints.push_back(end);
    }
  }
  return scenes;
}

std::vector<BufferScene> read_buffer(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  try {
    return read_buffer(in);
  } catch (const SchemaError& e) {
    throw SchemaError(e.column(), path.string() + ": " + e.what());
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& buffer) {
  auto p = buffer;
  p.replace_extension(".norm.json");
  return p;
}

void write_buffer_meta(const std::filesystem::path& path,
                       const BufferMeta& meta) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["vehicle_id"] = meta.vehicle_id;
  j["env_mode"] = to_string(meta.env_mode);
  j["scenes"] = meta.scenes;
  std::vector<std::string> names(feature_names().begin(), feature_names().end());
  j["features"] = names;
  j["normalization"] = normalization_json(meta.normalization);
  write_file_atomic(path, j.dump(2) + "\n");
}

BufferMeta read_buffer_meta(const std::filesystem::path& path) {
  const auto j = parse_json_file(path);
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw SchemaError("schema_version", path.string() +
                                              ": unsupported schema version");
    }
    BufferMeta meta;
    meta.vehicle_id = j.at("vehicle_id").get<long>();
    meta.env_mode = env_mode_from_string(j.at("env_mode").get<std::string>());
    meta.scenes = j.at("scenes").get<std::size_t>();
    meta.normalization = normalization_from(j.at("normalization"));
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("json", path.string() + ": " + e.what());
  }
}

std::string model_json(const ModelFile& model) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  std::vector<std::string> names(feature_names().begin(), feature_names().end());
  j["features"] = names;
  ordered_json weights = ordered_json::object();
  ordered_json learnable = ordered_json::object();
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    weights[names[i]] = model.theta[i];
    learnable[names[i]] = model.layout.learnable[i];
  }
  j["weights"] = weights;
  j["learnable"] = learnable;
  j["fixed_values"] = model.layout.fixed;
  const auto& o = model.options;
  j["hyperparameters"] = {{"lambda", o.lambda},
                          {"alpha", o.alpha},
                          {"epochs", o.epochs},
                          {"init_std", o.init_std},
                          {"include_demo_in_partition",
                           o.include_demo_in_partition}};
  j["seed"] = o.seed;
  j["normalization"] = normalization_json(model.normalization);
  j["pooled"] = model.pooled;
  j["env_mode"] = to_string(model.env_mode);
  j["vehicles"] = model.vehicles;
  j["config_hash"] = model.config_hash;
  return j.dump(2) + "\n";
}

void write_model(const std::filesystem::path& path, const ModelFile& model) {
  write_file_atomic(path, model_json(model));
}

ModelFile read_model(const std::filesystem::path& path) {
  const auto j = parse_json_file(path);
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw SchemaError("schema_version",
                        path.string() + ": unsupported model schema version");
    }
    ModelFile m;
    const auto names = feature_names();
    const auto fixed = j.at("fixed_values").get<std::vector<double>>();
    if (fixed.size() != kFeatureCount) {
      throw SchemaError("fixed_values", path.string() + ": wrong length");
    }
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      const std::string name(names[i]);
      m.theta[i] = j.at("weights").at(name).get<double>();
      m.layout.learnable[i] = j.at("learnable").at(name).get<bool>();
      m.layout.fixed[i] = fixed[i];
    }
    const auto& h = j.at("hyperparameters");
    m.options.lambda = h.at("lambda").get<double>();
    m.options.alpha = h.at("alpha").get<double>();
    m.options.epochs = h.at("epochs").get<int>();
    m.options.init_std = h.at("init_std").get<double>();
    m.options.include_demo_in_partition =
        h.at("include_demo_in_partition").get<bool>();
    m.options.seed = j.at("seed").get<std::uint64_t>();
    m.options.layout = m.layout;
    m.normalization = normalization_from(j.at("normalization"));
    m.pooled = j.at("pooled").get<bool>();
    m.env_mode = env_mode_from_string(j.at("env_mode").get<std::string>());
    m.vehicles = j.at("vehicles").get<std::vector<long>>();
    m.config_hash = j.value("config_hash", "");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("json", path.string() + ": " + e.what());
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_train_report(std::ostream& out, const TrainReport& report) {
  out << "epoch,objective,mean_log_likelihood,feature_gap_l2,"
         "train_human_likeness\n";
  for (const auto& e : report.epochs) {
    out << e.epoch << ',' << format_double(e.objective) << ','
        << format_double(e.mean_log_likelihood) << ','
        << format_double(e.feature_gap_l2) << ','
        << format_double(e.train_human_likeness) << '\n';
  }
}

void write_scene_rows(std::ostream& out, const std::vector<SceneRow>& rows) {
  out << "vehicle_id,scene_id,split,method,env_mode,human_likeness\n";
  for (const auto& r : rows) {
    out << r.vehicle_id << ',' << r.scene_id << ',' << r.split << ','
        << r.method << ',' << r.env_mode << ','
        << format_double(r.human_likeness) << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << text;
    if (!out) throw DataError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace irldrive
