#include "irldrive/data_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "json.hpp"
#include "irldrive/errors.hpp"
#include "irldrive/savitzky_golay.hpp"

namespace irldrive {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line_no,
               std::string_view column) {
  T value{};
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  // NGSIM ids are written as integers but some exports use "12.0".
  if constexpr (std::is_integral_v<T>) {
    double as_double = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, as_double);
    if (ec == std::errc() && ptr == end &&
        as_double == std::floor(as_double)) {
      return static_cast<T>(as_double);
    }
  } else {
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec == std::errc() && ptr == end) return value;
  }
  throw DataError("line " + std::to_string(line_no) + ": cannot parse " +
                  std::string(column) + " value '" + std::string(text) + "'");
}

class ColumnIndex {
 public:
  explicit ColumnIndex(const std::vector<std::string_view>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      index_.emplace(std::string(header[i]), i);
    }
  }

  std::size_t require(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw SchemaError(name);
    return it->second;
  }

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

// Groups rows by vehicle, sorts by frame and checks that every vehicle's
// frames form a gap-free run.
Dataset assemble_tracks(std::map<long, std::vector<std::pair<long, TrackState>>>
                            rows_by_vehicle,
                        const std::map<long, std::pair<double, double>>& dims) {
  Dataset dataset;
  for (auto& [id, rows] : rows_by_vehicle) {
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    VehicleTrack track;
    track.vehicle_id = id;
    track.first_frame = rows.front().first;
    track.length = dims.at(id).first;
    track.width = dims.at(id).second;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && rows[i].first == rows[i - 1].first) {
        throw DataError("duplicate row for vehicle " + std::to_string(id) +
                        " at frame " + std::to_string(rows[i].first));
      }
      if (i > 0 && rows[i].first != rows[i - 1].first + 1) {
        throw DataError("frames of vehicle " + std::to_string(id) +
                        " are not contiguous: " +
                        std::to_string(rows[i - 1].first) + " -> " +
                        std::to_string(rows[i].first));
      }
      track.states.push_back(rows[i].second);
    }
    dataset.emplace(id, std::move(track));
  }
  return dataset;
}

std::string format_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

Dataset parse_ngsim_csv(std::istream& in, LengthUnit unit) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw SchemaError("Vehicle_ID", "empty file: no header row");
  }
  ++line_no;
  const auto header = split_csv(line);
  const ColumnIndex columns(header);
  const auto c_vehicle = columns.require("Vehicle_ID");
  const auto c_frame = columns.require("Frame_ID");
  const auto c_local_x = columns.require("Local_X");
  const auto c_local_y = columns.require("Local_Y");
  const auto c_length = columns.require("v_Length");
  const auto c_width = columns.require("v_Width");
  const auto c_lane = columns.require("Lane_ID");
  const auto c_preceding = columns.find("Preceding");
  const auto c_following = columns.find("Following");
  const double scale = unit == LengthUnit::kFeet ? kFeetToMeters : 1.0;

  std::map<long, std::vector<std::pair<long, TrackState>>> rows_by_vehicle;
  std::map<long, std::pair<double, double>> dims;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() < header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    RawSample raw;
    raw.vehicle_id = parse_number<long>(fields[c_vehicle], line_no, "Vehicle_ID");
    raw.frame_id = parse_number<long>(fields[c_frame], line_no, "Frame_ID");
    raw.local_x = scale * parse_number<double>(fields[c_local_x], line_no, "Local_X");
    raw.local_y = scale * parse_number<double>(fields[c_local_y], line_no, "Local_Y");
    raw.length = scale * parse_number<double>(fields[c_length], line_no, "v_Length");
    raw.width = scale * parse_number<double>(fields[c_width], line_no, "v_Width");
    raw.lane_id = parse_number<int>(fields[c_lane], line_no, "Lane_ID");
    if (c_preceding) {
      raw.preceding_id = parse_number<long>(fields[*c_preceding], line_no, "Preceding");
    }
    if (c_following) {
      raw.following_id = parse_number<long>(fields[*c_following], line_no, "Following");
    }
    if (raw.lane_id < 1 || raw.lane_id > 8) {
      throw DataError("line " + std::to_string(line_no) + ": Lane_ID " +
                      std::to_string(raw.lane_id) + " outside 1..8");
    }

    TrackState state;
    state.x = raw.local_y;
    state.y = raw.local_x;
    state.lane_id = raw.lane_id;
    rows_by_vehicle[raw.vehicle_id].emplace_back(raw.frame_id, state);
    dims.try_emplace(raw.vehicle_id, raw.length, raw.width);
  }
  return assemble_tracks(std::move(rows_by_vehicle), dims);
}

Dataset parse_ngsim_csv(const std::filesystem::path& path, LengthUnit unit) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return parse_ngsim_csv(in, unit);
  } catch (const SchemaError& e) {
    throw SchemaError(e.column(), path.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

VehicleTrack smooth_track(const VehicleTrack& raw,
                          const SmoothingOptions& options) {
  const SavitzkyGolay filter(options.half_window, options.order);
  const auto window = static_cast<std::size_t>(filter.window());
  if (raw.states.size() < window) {
    throw TooShortError(raw.vehicle_id, raw.states.size(), window);
  }
  std::vector<double> xs, ys;
  xs.reserve(raw.states.size());
  ys.reserve(raw.states.size());
  for (const auto& s : raw.states) {
    xs.push_back(s.x);
    ys.push_back(s.y);
  }
  const auto fx = filter.apply(xs, raw.dt);
  const auto fy = filter.apply(ys, raw.dt);

  VehicleTrack out = raw;
  for (std::size_t i = 0; i < out.states.size(); ++i) {
    auto& s = out.states[i];
    s.x = fx.value[i];
    s.vx = fx.first[i];
    s.ax = fx.second[i];
    s.y = fy.value[i];
    s.vy = fy.first[i];
    s.ay = fy.second[i];
    if (std::abs(s.ax) > options.max_abs_accel ||
        std::abs(s.ay) > options.max_abs_accel) {
      throw DataError("vehicle " + std::to_string(raw.vehicle_id) +
                      ": smoothed acceleration exceeds " +
                      format_fixed(options.max_abs_accel) + " m/s^2 at frame " +
                      std::to_string(raw.first_frame + static_cast<long>(i)));
    }
  }
  return out;
}

Segmentation segment_scenes(const VehicleTrack& track, const Dataset& dataset,
                            const SegmentOptions& options) {
  Segmentation out;
  const long steps = std::lround(options.horizon / track.dt);
  const long stride = options.stride > 0.0
                          ? std::lround(options.stride / track.dt)
                          : steps;
  const long n = static_cast<long>(track.states.size());
  const long fit = n >= steps + 1 ? (n - 1 - steps) / stride + 1 : 0;
  const long emit = std::min<long>(fit, options.count);
  if (fit < options.count) {
    out.warnings.push_back("vehicle " + std::to_string(track.vehicle_id) +
                           ": only " + std::to_string(fit) + " of " +
                           std::to_string(options.count) +
                           " scene windows fit in the track");
  }

  for (long w = 0; w < emit; ++w) {
    Scene scene;
    scene.ego_id = track.vehicle_id;
    scene.scene_id = "v" + std::to_string(track.vehicle_id) + "_s" +
                     std::to_string(w);
    scene.start_frame = track.first_frame + w * stride;
    scene.horizon = options.horizon;
    scene.dt = track.dt;
    scene.ego_init = track.at_frame(scene.start_frame);
    scene.ego_length = track.length;
    scene.ego_width = track.width;
    const long end = scene.start_frame + steps;
    scene.ego_ground_truth = track.slice(scene.start_frame, end);

    for (const auto& [id, other] : dataset) {
      if (id == track.vehicle_id) continue;
      const long lo = std::max(scene.start_frame, other.first_frame);
      const long hi = std::min(end, other.last_frame());
      if (other.empty() || lo > hi) continue;
      bool near = false;
      for (long f = lo; f <= hi && !near; ++f) {
        near = std::abs(other.at_frame(f).x - track.at_frame(f).x) <=
               options.interaction_range;
      }
      if (near) scene.neighbor_tracks.emplace(id, other.slice(lo, hi));
    }
    out.scenes.push_back(std::move(scene));
  }
  return out;
}

CandidateTrajectory refit_demonstration(const Scene& scene) {
  const auto& gt = scene.ego_ground_truth.states;
  if (static_cast<int>(gt.size()) != scene.steps() + 1) {
    throw DataError("scene " + scene.scene_id + ": ground truth has " +
                    std::to_string(gt.size()) + " states, expected " +
                    std::to_string(scene.steps() + 1));
  }
  const auto& s = gt.front();
  const auto& e = gt.back();
  PolynomialPair poly;
  poly.horizon = scene.horizon;
  poly.longitudinal =
      solve_longitudinal(s.x, s.vx, s.ax, e.vx, e.ax, scene.horizon);
  poly.lateral =
      solve_lateral(s.y, s.vy, s.ay, e.y, e.vy, e.ay, scene.horizon);
  return sample_polynomials(poly, scene.dt, scene.steps(),
                            TrajectorySource::kDemonstration, std::nullopt);
}

StoreFormat store_format_for(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".ndjson") ? StoreFormat::kJsonLines
                                               : StoreFormat::kCsv;
}

void write_track_store(const Dataset& dataset, std::ostream& out,
                       StoreFormat format) {
  if (format == StoreFormat::kCsv) {
    out << "vehicle_id,t,x,y,vx,vy,ax,ay,lane_id,length,width\n";
  }
  for (const auto& [id, track] : dataset) {
    for (std::size_t i = 0; i < track.states.size(); ++i) {
      const auto& s = track.states[i];
      const double t = (track.first_frame + static_cast<long>(i)) * track.dt;
      if (format == StoreFormat::kCsv) {
        out << id << ',' << format_fixed(t) << ',' << format_fixed(s.x) << ','
            << format_fixed(s.y) << ',' << format_fixed(s.vx) << ','
            << format_fixed(s.vy) << ',' << format_fixed(s.ax) << ','
            << format_fixed(s.ay) << ',' << s.lane_id << ','
            << format_fixed(track.length) << ',' << format_fixed(track.width)
            << '\n';
      } else {
        out << "{\"vehicle_id\":" << id << ",\"t\":" << format_fixed(t)
            << ",\"x\":" << format_fixed(s.x) << ",\"y\":" << format_fixed(s.y)
            << ",\"vx\":" << format_fixed(s.vx)
            << ",\"vy\":" << format_fixed(s.vy)
            << ",\"ax\":" << format_fixed(s.ax)
            << ",\"ay\":" << format_fixed(s.ay) << ",\"lane_id\":" << s.lane_id
            << ",\"length\":" << format_fixed(track.length)
            << ",\"width\":" << format_fixed(track.width) << "}\n";
      }
    }
  }
}

void write_track_store(const Dataset& dataset,
                       const std::filesystem::path& path, StoreFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_track_store(dataset, out, format);
}

Dataset read_track_store(std::istream& in, StoreFormat format) {
  std::map<long, std::vector<std::pair<long, TrackState>>> rows;
  std::map<long, std::pair<double, double>> dims;
  std::string line;
  std::size_t line_no = 0;

  auto add = [&](long id, double t, const TrackState& s, double length,
                 double width) {
    rows[id].emplace_back(std::lround(t / kFrameDt), s);
    dims.try_emplace(id, length, width);
  };

  if (format == StoreFormat::kCsv) {
    if (!std::getline(in, line)) return {};
    ++line_no;
    const auto header = split_csv(line);
    const ColumnIndex columns(header);
    const std::array<std::string, 11> names{"vehicle_id", "t",  "x",  "y",
                                            "vx",         "vy", "ax", "ay",
                                            "lane_id",    "length", "width"};
    std::array<std::size_t, 11> idx{};
    for (std::size_t i = 0; i < names.size(); ++i) {
      idx[i] = columns.require(names[i]);
    }
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      const auto f = split_csv(line);
      if (f.size() < header.size()) {
        throw DataError("track store line " + std::to_string(line_no) +
                        ": too few fields");
      }
      TrackState s;
      const long id = parse_number<long>(f[idx[0]], line_no, names[0]);
      const double t = parse_number<double>(f[idx[1]], line_no, names[1]);
      s.x = parse_number<double>(f[idx[2]], line_no, names[2]);
      s.y = parse_number<double>(f[idx[3]], line_no, names[3]);
      s.vx = parse_number<double>(f[idx[4]], line_no, names[4]);
      s.vy = parse_number<double>(f[idx[5]], line_no, names[5]);
      s.ax = parse_number<double>(f[idx[6]], line_no, names[6]);
      s.ay = parse_number<double>(f[idx[7]], line_no, names[7]);
      s.lane_id = parse_number<int>(f[idx[8]], line_no, names[8]);
      add(id, t, s,
          parse_number<double>(f[idx[9]], line_no, names[9]),
          parse_number<double>(f[idx[10]], line_no, names[10]));
    }
  } else {
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw DataError("track store line " + std::to_string(line_no) + ": " +
                        e.what());
      }
      for (const char* key : {"vehicle_id", "t", "x", "y", "vx", "vy", "ax",
                              "ay", "lane_id", "length", "width"}) {
        if (!j.contains(key)) throw SchemaError(key);
      }
      TrackState s;
      s.x = j["x"];
      s.y = j["y"];
      s.vx = j["vx"];
      s.vy = j["vy"];
      s.ax = j["ax"];
      s.ay = j["ay"];
      s.lane_id = j["lane_id"];
      add(j["vehicle_id"].get<long>(), j["t"].get<double>(), s,
          j["length"].get<double>(), j["width"].get<double>());
    }
  }
  if (rows.empty()) return {};
  return assemble_tracks(std::move(rows), dims);
}

Dataset read_track_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open track store " + path.string());
  return read_track_store(in, store_format_for(path));
}

}  // namespace irldrive
