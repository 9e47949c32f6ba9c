#ifndef TRAJKIT_SERVICE_HPP
#define TRAJKIT_SERVICE_HPP

// Session service behind the correction UI. SessionService holds the request
// logic and is usable without a socket; register_routes() binds it to
// cpp-httplib.

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <regex>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "trajkit/correction.hpp"
#include "trajkit/ingest.hpp"
#include "trajkit/pci.hpp"
#include "trajkit/trajectory.hpp"

namespace trajkit {

struct ServiceResponse {
  int status = 200;
  std::string body;  // JSON text
};

struct PreviewOptions {
  bool with_pci = false;
  SamplerConfig sampler{};      // input/target lengths and fps of the profile grid
  double profile_stride_secs = 1.0;
};

/// Preview payload for a marker set: corrected points in both projections,
/// per-segment speeds and, optionally, the PCI heatmap of the corrected
/// track resampled to the sampler fps.
inline json build_preview(const Session& s, const PreviewOptions& opt) {
  std::vector<Millis> raw_ts;
  raw_ts.reserve(s.raw_track.size());
  for (const auto& r : s.raw_track) raw_ts.push_back(r.timestamp);
  const Trajectory corrected = correct_track(raw_ts, s.markers);

  json pts = json::array();
  for (std::size_t i = 0; i < corrected.size(); ++i) {
    const auto& p = corrected.points()[i];
    const GeoPoint g = from_mercator(p);
    pts.push_back({{"timestamp_ms", corrected.timestamps()[i]}, {"x", p.x}, {"y", p.y}, {"lat", g.lat}, {"lon", g.lon}});
  }
  json markers = json::array();
  for (const auto& m : s.markers) {
    const GeoPoint g = from_mercator(m.position);
    markers.push_back({{"timestamp_ms", m.timestamp}, {"x", m.position.x}, {"y", m.position.y}, {"lat", g.lat}, {"lon", g.lon}});
  }

  json out;
  out["session_id"] = s.session_id;
  out["markers"] = std::move(markers);
  out["corrected_points"] = std::move(pts);
  out["speeds"] = corrected.size() >= 2 ? json(speed_profile(corrected)) : json::array();
  if (opt.with_pci) {
    json profile = json::array();
    if (corrected.size() >= 2) {
      const Trajectory grid = resample(corrected, opt.sampler.fps);
      const auto values = pci_profile(grid, opt.sampler, opt.profile_stride_secs);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        profile.push_back({{"timestamp_ms", grid.timestamps()[i]},
                           {"mean_pci_m", values[i] ? json(*values[i]) : json(nullptr)}});
      }
    }
    out["pci_profile"] = std::move(profile);
  }
  return out;
}

class SessionService {
public:
  explicit SessionService(std::filesystem::path data_dir) : dir_(std::move(data_dir)) {
    std::filesystem::create_directories(dir_);
  }

  /// Invoked with the session id while a mutation holds its exclusive lock.
  void set_edit_hook(std::function<void(const std::string&)> hook) { edit_hook_ = std::move(hook); }

  ServiceResponse list_sessions() const {
    std::vector<std::string> ids;
    for (const auto& e : std::filesystem::directory_iterator(dir_)) {
      if (!e.is_regular_file() || e.path().extension() != ".json") continue;
      const auto id = e.path().stem().string();
      if (id == "manifest" || !valid_id(id)) continue;
      ids.push_back(id);
    }
    std::ranges::sort(ids);
    return {200, json(ids).dump()};
  }

  ServiceResponse get_session(const std::string& id) {
    auto* entry = find(id);
    if (!entry) return not_found(id);
    std::shared_lock lock(entry->mutex);
    return {200, detail::read_file(path_of(id))};
  }

  ServiceResponse put_markers(const std::string& id, const std::string& body) {
    auto* entry = find(id);
    if (!entry) return not_found(id);
    std::vector<Marker> markers;
    try {
      markers = markers_from_json(json::parse(body));
      validate_markers(markers);
    } catch (const std::exception& e) {
      return error(422, std::string("invalid markers: ") + e.what());
    }

    std::unique_lock lock(entry->mutex, std::try_to_lock);
    if (!lock.owns_lock()) return error(409, "another edit is in flight for session " + id);
    if (edit_hook_) edit_hook_(id);

    Session s = load_session(path_of(id));
    std::vector<Millis> raw_ts;
    for (const auto& r : s.raw_track) raw_ts.push_back(r.timestamp);
    try {
      markers = snap_markers(raw_ts, markers);
    } catch (const std::exception& e) {
      return error(422, std::string("invalid markers: ") + e.what());
    }
    s.markers = std::move(markers);
    save_session(path_of(id), s);

    if (s.markers.size() >= 2) return {200, build_preview(s, {}).dump()};
    json ack;
    ack["session_id"] = id;
    ack["markers"] = json::array();
    for (const auto& m : s.markers) {
      ack["markers"].push_back({{"timestamp_ms", m.timestamp}, {"x", m.position.x}, {"y", m.position.y}});
    }
    return {200, ack.dump()};
  }

  ServiceResponse preview(const std::string& id, bool with_pci) {
    auto* entry = find(id);
    if (!entry) return not_found(id);
    std::shared_lock lock(entry->mutex);
    const Session s = load_session(path_of(id));
    if (s.markers.size() < 2) return error(409, "preview needs at least 2 markers");
    PreviewOptions opt;
    opt.with_pci = with_pci;
    return {200, build_preview(s, opt).dump()};
  }

  ServiceResponse commit(const std::string& id) {
    auto* entry = find(id);
    if (!entry) return not_found(id);
    std::unique_lock lock(entry->mutex, std::try_to_lock);
    if (!lock.owns_lock()) return error(409, "another edit is in flight for session " + id);
    if (edit_hook_) edit_hook_(id);

    Session s = load_session(path_of(id));
    if (s.markers.size() < 2) return error(409, "nothing to commit: fewer than 2 markers");
    std::vector<Millis> raw_ts;
    for (const auto& r : s.raw_track) raw_ts.push_back(r.timestamp);
    s.corrected_track = correct_track(raw_ts, s.markers);
    save_session(path_of(id), s);
    json out;
    out["session_id"] = id;
    out["committed_points"] = s.corrected_track->size();
    return {200, out.dump()};
  }

  static bool valid_id(const std::string& id) {
    static const std::regex re(R"([A-Za-z0-9_\-][A-Za-z0-9_.\-]*)");
    return std::regex_match(id, re);
  }

private:
  struct Entry {
    std::shared_mutex mutex;
  };

  std::filesystem::path path_of(const std::string& id) const { return dir_ / (id + ".json"); }

  Entry* find(const std::string& id) {
    if (!valid_id(id) || id == "manifest" || !std::filesystem::exists(path_of(id))) return nullptr;
    std::lock_guard guard(registry_mutex_);
    auto& slot = entries_[id];
    if (!slot) slot = std::make_unique<Entry>();
    return slot.get();
  }

  static ServiceResponse error(int status, const std::string& message) {
    json j;
    j["error"] = message;
    return {status, j.dump()};
  }

  static ServiceResponse not_found(const std::string& id) { return error(404, "unknown session '" + id + "'"); }

  std::filesystem::path dir_;
  std::mutex registry_mutex_;
  std::map<std::string, std::unique_ptr<Entry>> entries_;
  std::function<void(const std::string&)> edit_hook_;
};

/// Binds the JSON API to `server`. Every response carries CORS headers for
/// `cors_origin`.
inline void register_routes(httplib::Server& server, SessionService& service,
                            const std::string& cors_origin = "*") {
  auto reply = [](httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  auto guarded = [reply](httplib::Response& res, const auto& fn) {
    try {
      reply(res, fn());
    } catch (const std::exception& e) {
      json j;
      j["error"] = e.what();
      reply(res, {500, j.dump()});
    }
  };

  server.set_post_routing_handler([cors_origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", cors_origin);
    res.set_header("Access-Control-Allow-Methods", "GET, PUT, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Get("/sessions", [&service, guarded](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { return service.list_sessions(); });
  });
  server.Get(R"(/sessions/([^/]+))", [&service, guarded](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return service.get_session(req.matches[1]); });
  });
  server.Put(R"(/sessions/([^/]+)/markers)", [&service, guarded](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return service.put_markers(req.matches[1], req.body); });
  });
  server.Get(R"(/sessions/([^/]+)/preview)", [&service, guarded](const httplib::Request& req, httplib::Response& res) {
    const bool with_pci = req.has_param("pci") && req.get_param_value("pci") == "true";
    guarded(res, [&] { return service.preview(req.matches[1], with_pci); });
  });
  server.Post(R"(/sessions/([^/]+)/commit)", [&service, guarded](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return service.commit(req.matches[1]); });
  });
}

}  // namespace trajkit

#endif  // TRAJKIT_SERVICE_HPP
