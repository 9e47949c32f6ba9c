#ifndef TRAJKIT_INGEST_HPP
#define TRAJKIT_INGEST_HPP

// File formats: CSV streams, predictions, marker/centerline JSON and the
// per-session JSON document.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "trajkit/correction.hpp"
#include "trajkit/error.hpp"
#include "trajkit/gaze.hpp"
#include "trajkit/geodesy.hpp"
#include "trajkit/metrics.hpp"
#include "trajkit/trajectory.hpp"

namespace trajkit {

using json = nlohmann::json;

inline constexpr int kSessionVersion = 1;

struct GpsRecord {
  Millis timestamp = 0;
  GeoPoint position;

  friend bool operator==(const GpsRecord&, const GpsRecord&) = default;
};

using RawTrack = std::vector<GpsRecord>;

enum class Split { train, val, test };

inline std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

inline Split split_from_string(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  throw FormatError("unknown split '" + std::string(s) + "'");
}

struct Session {
  std::string session_id;
  RawTrack raw_track;
  std::optional<Trajectory> corrected_track;
  std::vector<Marker> markers;
  std::optional<GazeStream> gaze;
  std::optional<Split> split;

  friend bool operator==(const Session&, const Session&) = default;
};

// ---------------------------------------------------------------------------
// Number formatting / parsing

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_fixed(double v, int precision) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T v{};
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Row of a three-column numeric CSV: integer timestamp + two doubles.
struct CsvRow {
  std::size_t row = 0;
  std::size_t line = 0;
  Millis timestamp = 0;
  double a = 0.0;
  double b = 0.0;
};

/// Parses `timestamp_ms,<a>,<b>` with strictly increasing timestamps.
inline std::vector<CsvRow> parse_timestamped_csv(std::istream& in, const std::string& source,
                                                 std::string_view expected_header) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (trim(line) != expected_header) {
      throw FormatError(source, 0, line_no, "expected header '" + std::string(expected_header) + "'");
    }
    have_header = true;
    break;
  }
  if (!have_header) throw FormatError(source, 0, line_no, "missing header");

  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::size_t row = rows.size() + 1;
    const auto fields = split_fields(line);
    if (fields.size() != 3) {
      throw FormatError(source, row, line_no, "expected 3 fields, got " + std::to_string(fields.size()));
    }
    const auto t = parse_number<Millis>(fields[0]);
    const auto a = parse_number<double>(fields[1]);
    const auto b = parse_number<double>(fields[2]);
    if (!t) throw FormatError(source, row, line_no, "non-integer timestamp '" + std::string(fields[0]) + "'");
    if (!a || !std::isfinite(*a)) throw FormatError(source, row, line_no, "non-numeric field '" + std::string(fields[1]) + "'");
    if (!b || !std::isfinite(*b)) throw FormatError(source, row, line_no, "non-numeric field '" + std::string(fields[2]) + "'");
    if (!rows.empty() && *t <= rows.back().timestamp) {
      throw FormatError(source, row, line_no,
                        *t == rows.back().timestamp ? "duplicate timestamp" : "decreasing timestamp");
    }
    rows.push_back({row, line_no, *t, *a, *b});
  }
  return rows;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

inline std::string read_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Writes `contents` to a sibling temp file and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// GPS and gaze CSV

inline constexpr std::string_view kGpsHeader = "timestamp_ms,lat,lon";
inline constexpr std::string_view kGazeHeader = "timestamp_ms,x_px,y_px";
inline constexpr std::string_view kPlaneHeader = "timestamp_ms,x,y";

inline RawTrack parse_gps_csv(std::istream& in, const std::string& source = "gps csv") {
  RawTrack out;
  for (const auto& r : detail::parse_timestamped_csv(in, source, kGpsHeader)) {
    if (std::abs(r.a) > kMaxMercatorLatitude || std::abs(r.b) > 180.0) {
      throw FormatError(source, r.row, r.line, "coordinate outside the Web Mercator domain");
    }
    out.push_back({r.timestamp, {r.a, r.b}});
  }
  return out;
}

inline RawTrack load_gps_csv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_gps_csv(in, path.string());
}

inline void write_gps_csv(std::ostream& out, const RawTrack& track) {
  out << kGpsHeader << '\n';
  for (const auto& r : track) {
    out << r.timestamp << ',' << format_double(r.position.lat) << ',' << format_double(r.position.lon) << '\n';
  }
}

inline void save_gps_csv(const std::filesystem::path& path, const RawTrack& track) {
  std::ostringstream ss;
  write_gps_csv(ss, track);
  write_file_atomic(path, ss.str());
}

inline GazeStream parse_gaze_csv(std::istream& in, const std::string& source = "gaze csv") {
  GazeStream out;
  for (const auto& r : detail::parse_timestamped_csv(in, source, kGazeHeader)) {
    out.push_back({r.timestamp, r.a, r.b});
  }
  return out;
}

inline GazeStream load_gaze_csv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_gaze_csv(in, path.string());
}

inline void write_gaze_csv(std::ostream& out, const GazeStream& stream) {
  out << kGazeHeader << '\n';
  for (const auto& s : stream) {
    out << s.timestamp << ',' << format_double(s.x) << ',' << format_double(s.y) << '\n';
  }
}

inline void save_gaze_csv(const std::filesystem::path& path, const GazeStream& stream) {
  std::ostringstream ss;
  write_gaze_csv(ss, stream);
  write_file_atomic(path, ss.str());
}

/// Projects a raw GPS track to EPSG:3857.
inline Trajectory project(const RawTrack& track) {
  std::vector<Millis> ts;
  std::vector<PlanePoint> ps;
  for (const auto& r : track) {
    ts.push_back(r.timestamp);
    ps.push_back(to_mercator(r.position));
  }
  return Trajectory(std::move(ts), std::move(ps));
}

inline void write_plane_csv(std::ostream& out, const Trajectory& traj) {
  out << kPlaneHeader << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << traj.timestamps()[i] << ',' << format_double(traj.points()[i].x) << ','
        << format_double(traj.points()[i].y) << '\n';
  }
}

/// Loads a track from `timestamp_ms,lat,lon` (projected), `timestamp_ms,x,y`
/// (already planar), or a session JSON (corrected track if committed,
/// projected raw track otherwise).
inline Trajectory load_trajectory_file(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Predictions CSV: window_id,step,x,y with 1-based contiguous steps.

inline constexpr std::string_view kPredictionHeader = "window_id,step,x,y";

inline std::map<WindowId, std::vector<PlanePoint>> parse_predictions_csv(std::istream& in,
                                                                         const std::string& source = "predictions csv") {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    if (detail::trim(line) != kPredictionHeader) {
      throw FormatError(source, 0, line_no, "expected header '" + std::string(kPredictionHeader) + "'");
    }
    have_header = true;
    break;
  }
  if (!have_header) throw FormatError(source, 0, line_no, "missing header");

  std::map<WindowId, std::vector<PlanePoint>> out;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    ++row;
    const auto f = detail::split_fields(line);
    if (f.size() != 4) throw FormatError(source, row, line_no, "expected 4 fields");
    const auto id = detail::parse_number<WindowId>(f[0]);
    const auto step = detail::parse_number<std::int64_t>(f[1]);
    const auto x = detail::parse_number<double>(f[2]);
    const auto y = detail::parse_number<double>(f[3]);
    if (!id || !step) throw FormatError(source, row, line_no, "window_id and step must be integers");
    if (!x || !y || !std::isfinite(*x) || !std::isfinite(*y)) {
      throw FormatError(source, row, line_no, "non-numeric coordinate");
    }
    auto& seq = out[*id];
    if (*step != static_cast<std::int64_t>(seq.size()) + 1) {
      throw FormatError(source, row, line_no,
                        "window " + std::to_string(*id) + ": expected step " + std::to_string(seq.size() + 1));
    }
    seq.push_back({*x, *y});
  }
  return out;
}

inline std::map<WindowId, std::vector<PlanePoint>> load_predictions_csv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_predictions_csv(in, path.string());
}

inline void write_predictions_csv(std::ostream& out, const std::map<WindowId, std::vector<PlanePoint>>& preds) {
  out << kPredictionHeader << '\n';
  for (const auto& [id, pts] : preds) {
    for (std::size_t k = 0; k < pts.size(); ++k) {
      out << id << ',' << (k + 1) << ',' << format_double(pts[k].x) << ',' << format_double(pts[k].y) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Markers and centerlines

/// Marker from `{"timestamp_ms", "x", "y"}` or `{"timestamp_ms", "lat", "lon"}`.
inline Marker marker_from_json(const json& j) {
  if (!j.is_object() || !j.contains("timestamp_ms") || !j["timestamp_ms"].is_number_integer()) {
    throw FormatError("marker: integer timestamp_ms required");
  }
  Marker m;
  m.timestamp = j["timestamp_ms"].get<Millis>();
  if (j.contains("x") && j.contains("y") && j["x"].is_number() && j["y"].is_number()) {
    m.position = {j["x"].get<double>(), j["y"].get<double>()};
  } else if (j.contains("lat") && j.contains("lon") && j["lat"].is_number() && j["lon"].is_number()) {
    m.position = to_mercator({j["lat"].get<double>(), j["lon"].get<double>()});
  } else {
    throw FormatError("marker: needs numeric x/y or lat/lon");
  }
  return m;
}

/// `{"markers": [...]}` or a bare array.
inline std::vector<Marker> markers_from_json(const json& j) {
  const json& arr = j.is_object() && j.contains("markers") ? j["markers"] : j;
  if (!arr.is_array()) throw FormatError("markers: expected an array");
  std::vector<Marker> out;
  for (const auto& m : arr) out.push_back(marker_from_json(m));
  return out;
}

inline std::vector<Marker> load_markers_json(const std::filesystem::path& path) {
  try {
    return markers_from_json(json::parse(detail::read_file(path)));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

/// LineString (and MultiLineString) features of a GeoJSON document,
/// projected to EPSG:3857.
inline std::vector<Centerline> centerlines_from_geojson(const json& doc) {
  std::vector<Centerline> out;
  auto add_line = [&](const json& coords) {
    std::vector<PlanePoint> pts;
    for (const auto& c : coords) {
      if (!c.is_array() || c.size() < 2) throw FormatError("geojson: bad coordinate");
      // GeoJSON order is [lon, lat]
      pts.push_back(to_mercator({c[1].get<double>(), c[0].get<double>()}));
    }
    out.emplace_back(std::move(pts));
  };
  auto add_geometry = [&](const json& g) {
    const auto type = g.value("type", std::string{});
    if (type == "LineString") {
      add_line(g.at("coordinates"));
    } else if (type == "MultiLineString") {
      for (const auto& line : g.at("coordinates")) add_line(line);
    }
  };
  const auto type = doc.value("type", std::string{});
  if (type == "FeatureCollection") {
    for (const auto& f : doc.at("features")) {
      if (f.contains("geometry") && !f["geometry"].is_null()) add_geometry(f["geometry"]);
    }
  } else if (type == "Feature") {
    add_geometry(doc.at("geometry"));
  } else {
    add_geometry(doc);
  }
  return out;
}

inline std::vector<Centerline> load_centerlines_geojson(const std::filesystem::path& path) {
  try {
    return centerlines_from_geojson(json::parse(detail::read_file(path)));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Session JSON

inline json to_json(const Session& s) {
  json j;
  j["version"] = kSessionVersion;
  j["session_id"] = s.session_id;
  j["split"] = s.split ? json(to_string(*s.split)) : json(nullptr);
  json raw = json::array();
  for (const auto& r : s.raw_track) {
    raw.push_back({{"timestamp_ms", r.timestamp}, {"lat", r.position.lat}, {"lon", r.position.lon}});
  }
  j["raw_track"] = std::move(raw);
  json markers = json::array();
  for (const auto& m : s.markers) {
    markers.push_back({{"timestamp_ms", m.timestamp}, {"x", m.position.x}, {"y", m.position.y}});
  }
  j["markers"] = std::move(markers);
  if (s.corrected_track) {
    json pts = json::array();
    for (std::size_t i = 0; i < s.corrected_track->size(); ++i) {
      pts.push_back({{"timestamp_ms", s.corrected_track->timestamps()[i]},
                     {"x", s.corrected_track->points()[i].x},
                     {"y", s.corrected_track->points()[i].y}});
    }
    j["corrected_track"] = std::move(pts);
  } else {
    j["corrected_track"] = nullptr;
  }
  if (s.gaze) {
    json g = json::array();
    for (const auto& smp : *s.gaze) g.push_back({{"timestamp_ms", smp.timestamp}, {"x_px", smp.x}, {"y_px", smp.y}});
    j["gaze"] = std::move(g);
  } else {
    j["gaze"] = nullptr;
  }
  return j;
}

/// Checks the Session invariants: non-empty raw track with increasing
/// timestamps, markers increasing and inside the raw span.
inline void validate_session(const Session& s) {
  if (s.session_id.empty()) throw FormatError("session: empty session_id");
  if (s.raw_track.empty()) throw FormatError("session " + s.session_id + ": empty raw_track");
  for (std::size_t i = 1; i < s.raw_track.size(); ++i) {
    if (s.raw_track[i].timestamp <= s.raw_track[i - 1].timestamp) {
      throw FormatError("session " + s.session_id + ": raw_track timestamps not increasing at index " +
                        std::to_string(i));
    }
  }
  validate_markers(s.markers);
  for (const auto& m : s.markers) {
    if (m.timestamp < s.raw_track.front().timestamp || m.timestamp > s.raw_track.back().timestamp) {
      throw FormatError("session " + s.session_id + ": marker outside the raw track span");
    }
  }
  if (s.gaze) validate_stream(*s.gaze);
}

inline Session session_from_json(const json& j) {
  try {
    if (!j.is_object()) throw FormatError("session: expected a JSON object");
    if (!j.contains("version") || !j["version"].is_number_integer()) {
      throw UnsupportedVersionError("session: missing version tag");
    }
    if (j["version"].get<int>() != kSessionVersion) {
      throw UnsupportedVersionError("session: unsupported version " + j["version"].dump());
    }
    Session s;
    s.session_id = j.at("session_id").get<std::string>();
    if (j.contains("split") && !j["split"].is_null()) s.split = split_from_string(j["split"].get<std::string>());
    for (const auto& r : j.at("raw_track")) {
      s.raw_track.push_back({r.at("timestamp_ms").get<Millis>(), {r.at("lat").get<double>(), r.at("lon").get<double>()}});
    }
    for (const auto& m : j.at("markers")) {
      s.markers.push_back({m.at("timestamp_ms").get<Millis>(), {m.at("x").get<double>(), m.at("y").get<double>()}});
    }
    if (j.contains("corrected_track") && !j["corrected_track"].is_null()) {
      std::vector<Millis> ts;
      std::vector<PlanePoint> ps;
      for (const auto& p : j["corrected_track"]) {
        ts.push_back(p.at("timestamp_ms").get<Millis>());
        ps.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
      }
      s.corrected_track = Trajectory(std::move(ts), std::move(ps));
    }
    if (j.contains("gaze") && !j["gaze"].is_null()) {
      GazeStream g;
      for (const auto& p : j["gaze"]) {
        g.push_back({p.at("timestamp_ms").get<Millis>(), p.at("x_px").get<double>(), p.at("y_px").get<double>()});
      }
      s.gaze = std::move(g);
    }
    validate_session(s);
    return s;
  } catch (const json::exception& e) {
    throw FormatError(std::string("session: ") + e.what());
  } catch (const DomainError& e) {
    throw FormatError(std::string("session: ") + e.what());
  } catch (const SizeError& e) {
    throw FormatError(std::string("session: ") + e.what());
  }
}

/// Deterministic document text: sorted keys, shortest round-trip doubles.
inline std::string serialize_session(const Session& s) { return to_json(s).dump(2) + "\n"; }

inline void save_session(const std::filesystem::path& path, const Session& s) {
  validate_session(s);
  write_file_atomic(path, serialize_session(s));
}

inline Session load_session(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(detail::read_file(path));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return session_from_json(j);
}

// ---------------------------------------------------------------------------
// manifest.json: {"<session_id>": "train" | "val" | "test", ...}

using Manifest = std::map<std::string, Split>;

inline Manifest load_manifest(const std::filesystem::path& path) {
  try {
    const auto j = json::parse(detail::read_file(path));
    if (!j.is_object()) throw FormatError(path.string() + ": manifest must be an object");
    Manifest m;
    for (const auto& [id, split] : j.items()) m[id] = split_from_string(split.get<std::string>());
    return m;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline void save_manifest(const std::filesystem::path& path, const Manifest& m) {
  json j = json::object();
  for (const auto& [id, split] : m) j[id] = to_string(split);
  write_file_atomic(path, j.dump(2) + "\n");
}

/// Sessions of one split, in id order.
inline std::vector<std::string> sessions_in_split(const Manifest& m, Split split) {
  std::vector<std::string> out;
  for (const auto& [id, s] : m) {
    if (s == split) out.push_back(id);
  }
  return out;
}

inline Trajectory load_trajectory_file(const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    const Session s = load_session(path);
    return s.corrected_track ? *s.corrected_track : project(s.raw_track);
  }
  auto in = detail::open_input(path);
  std::string first;
  while (std::getline(in, first) && detail::trim(first).empty()) {
  }
  in.clear();
  in.seekg(0);
  if (detail::trim(first) == kGpsHeader) return project(parse_gps_csv(in, path.string()));
  if (detail::trim(first) == kPlaneHeader) {
    std::vector<Millis> ts;
    std::vector<PlanePoint> ps;
    for (const auto& r : detail::parse_timestamped_csv(in, path.string(), kPlaneHeader)) {
      ts.push_back(r.timestamp);
      ps.push_back({r.a, r.b});
    }
    if (ts.empty()) throw FormatError(path.string() + ": no samples");
    return Trajectory(std::move(ts), std::move(ps));
  }
  throw FormatError(path.string(), 0, 1,
                    "unrecognized header; expected '" + std::string(kGpsHeader) + "' or '" +
                        std::string(kPlaneHeader) + "'");
}

}  // namespace trajkit

#endif  // TRAJKIT_INGEST_HPP
