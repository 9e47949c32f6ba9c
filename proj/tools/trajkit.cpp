// trajkit command-line front end.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trajkit/correction.hpp"
#include "trajkit/gaze.hpp"
#include "trajkit/ingest.hpp"
#include "trajkit/metrics.hpp"
#include "trajkit/pci.hpp"
#include "trajkit/service.hpp"

using namespace trajkit;
namespace fs = std::filesystem;

namespace {

// Writes to `path`, or stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_file_atomic(path, text);
  }
}

void add_sampler_options(CLI::App* cmd, SamplerConfig& cfg) {
  cmd->add_option("--fps", cfg.fps, "Sampling rate of the window grid")->capture_default_str();
  cmd->add_option("--input-secs", cfg.input_secs, "Observed history length")->capture_default_str();
  cmd->add_option("--target-secs", cfg.target_secs, "Prediction horizon length")->capture_default_str();
  cmd->add_option("--stride-secs", cfg.stride_secs, "Window stride")->capture_default_str();
}

std::string opt_number(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

// ---------------------------------------------------------------------------

struct PciArgs {
  std::string track, output, profile;
  SamplerConfig sampler;
  double profile_stride = 1.0;
};

int run_pci(const PciArgs& a) {
  a.sampler.validate();
  const Trajectory grid = resample(load_trajectory_file(a.track), a.sampler.fps);
  std::ostringstream out;
  out << "window_start_ms,pci_m\n";
  for (const auto& w : window_pcis(grid, a.sampler)) out << w.window_start_ms << ',' << format_double(w.pci_m) << '\n';
  emit(a.output, out.str());

  if (!a.profile.empty()) {
    const auto values = pci_profile(grid, a.sampler, a.profile_stride);
    std::ostringstream prof;
    prof << "timestamp_ms,mean_pci_m\n";
    for (std::size_t i = 0; i < grid.size(); ++i) prof << grid.timestamps()[i] << ',' << opt_number(values[i]) << '\n';
    emit(a.profile, prof.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string predictions, session, baseline, json_out, table_out;
  SamplerConfig sampler;
  double threshold = kDefaultPciThreshold;
};

json aggregate_json(const Aggregate& a) {
  json j;
  j["count"] = a.count;
  j["ade"] = a.ade ? json(*a.ade) : json(nullptr);
  j["fde"] = a.fde ? json(*a.fde) : json(nullptr);
  json h = json::object();
  for (const auto& [k, v] : a.fde_at) h[std::to_string(k) + "s"] = v;
  j["fde_at"] = std::move(h);
  return j;
}

json report_json(const EvalReport& r) {
  json j;
  j["pci_threshold"] = r.pci_threshold;
  j["overall"] = aggregate_json(r.overall);
  j["high_pci"] = aggregate_json(r.filtered);
  json bins = json::array();
  for (const auto& b : r.bins) {
    auto e = aggregate_json(b.stats);
    e["bin"] = b.label;
    e["lower_m"] = b.lower;
    bins.push_back(std::move(e));
  }
  j["bins"] = std::move(bins);
  json samples = json::array();
  for (const auto& s : r.samples) {
    json e;
    e["window_id"] = s.window_id;
    e["ade"] = s.ade;
    e["fde"] = s.fde;
    e["pci"] = s.pci;
    json h = json::object();
    for (const auto& [k, v] : s.fde_at) h[std::to_string(k) + "s"] = v;
    e["fde_at"] = std::move(h);
    samples.push_back(std::move(e));
  }
  j["samples"] = std::move(samples);
  return j;
}

std::string report_table(const EvalReport& r, const std::vector<int>& horizons) {
  std::vector<std::string> head = {"", "n", "ADE", "ADE+" + format_double(r.pci_threshold) + "PCI", "FDE"};
  for (int h : horizons) head.push_back("FDE@" + std::to_string(h) + "s");

  auto cell = [](const std::optional<double>& v) { return v ? format_fixed(*v, 3) : std::string("-"); };
  std::vector<std::vector<std::string>> rows;
  auto add_row = [&](const std::string& name, const Aggregate& a, const std::optional<double>& filtered_ade) {
    std::vector<std::string> row = {name, std::to_string(a.count), cell(a.ade), cell(filtered_ade), cell(a.fde)};
    for (int h : horizons) {
      const auto it = a.fde_at.find(h);
      row.push_back(it == a.fde_at.end() ? "-" : format_fixed(it->second, 3));
    }
    rows.push_back(std::move(row));
  };
  add_row("all", r.overall, r.filtered.ade);
  for (const auto& b : r.bins) add_row("PCI " + b.label, b.stats, std::nullopt);

  std::vector<std::size_t> width(head.size());
  for (std::size_t c = 0; c < head.size(); ++c) {
    width[c] = head[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) out << "  ";
      if (c == 0) {
        out << cells[c] << std::string(width[c] - cells[c].size(), ' ');
      } else {
        out << std::string(width[c] - cells[c].size(), ' ') << cells[c];
      }
    }
    out << '\n';
  };
  line(head);
  for (const auto& row : rows) line(row);
  return out.str();
}

int run_eval(const EvalArgs& a) {
  a.sampler.validate();
  if (a.predictions.empty() == a.baseline.empty()) {
    throw ConfigError("eval: give exactly one of --predictions or --baseline");
  }
  const Trajectory grid = resample(load_trajectory_file(a.session), a.sampler.fps);
  const auto windows = sliding_windows(grid, a.sampler);

  std::vector<int> horizons;
  for (int h = 1; h <= static_cast<int>(std::floor(a.sampler.target_secs + 1e-9)); ++h) horizons.push_back(h);

  std::vector<SampleResult> samples;
  if (!a.baseline.empty()) {
    if (a.baseline != "linear" && a.baseline != "stationary") {
      throw ConfigError("eval: unknown baseline '" + a.baseline + "' (linear|stationary)");
    }
    for (std::size_t w = 0; w < windows.size(); ++w) {
      const auto pred = a.baseline == "linear" ? baseline_linear(windows[w]) : baseline_stationary(windows[w]);
      samples.push_back(evaluate_window(static_cast<WindowId>(w), pred, windows[w], a.sampler.fps, horizons));
    }
  } else {
    const auto preds = load_predictions_csv(a.predictions);
    for (const auto& [id, pts] : preds) {
      if (id < 0 || static_cast<std::size_t>(id) >= windows.size()) {
        throw RangeError("eval: prediction for window " + std::to_string(id) + " but the session has " +
                         std::to_string(windows.size()) + " windows");
      }
      const auto& win = windows[static_cast<std::size_t>(id)];
      if (pts.size() != win.target.size()) {
        throw SizeError("eval: window " + std::to_string(id) + " has " + std::to_string(pts.size()) +
                        " predicted steps, expected " + std::to_string(win.target.size()));
      }
      const Trajectory pred(std::vector<Millis>(win.target.timestamps().begin(), win.target.timestamps().end()), pts);
      samples.push_back(evaluate_window(id, pred, win, a.sampler.fps, horizons));
    }
  }

  const auto rep = report(std::move(samples), a.threshold);
  if (!a.json_out.empty()) emit(a.json_out, report_json(rep).dump(2) + "\n");
  emit(a.table_out, report_table(rep, horizons));
  return 0;
}

// ---------------------------------------------------------------------------

struct FixationArgs {
  std::string gaze, output;
  FixationConfig cfg;
  double downsample_fps = 0.0;
};

int run_fixations(const FixationArgs& a) {
  auto stream = load_gaze_csv(a.gaze);
  if (a.downsample_fps > 0.0) stream = median_downsample(stream, a.downsample_fps);
  std::ostringstream out;
  out << "start_ms,end_ms,cx,cy,n\n";
  for (const auto& f : detect_fixations(stream, a.cfg)) {
    out << f.start_ms << ',' << f.end_ms << ',' << format_double(f.cx) << ',' << format_double(f.cy) << ','
        << f.sample_count << '\n';
  }
  emit(a.output, out.str());
  return 0;
}

// ---------------------------------------------------------------------------

struct CorrectArgs {
  std::string track, markers, output, centerlines;
};

std::vector<Millis> raw_timestamps(const std::string& path) {
  const auto t = load_trajectory_file(path);
  return {t.timestamps().begin(), t.timestamps().end()};
}

int run_correct(const CorrectArgs& a) {
  const auto raw = raw_timestamps(a.track);
  const auto markers = snap_markers(raw, load_markers_json(a.markers));
  const Trajectory corrected = correct_track(raw, markers);

  std::vector<double> dist;
  if (!a.centerlines.empty()) dist = distance_to_centerline(corrected, load_centerlines_geojson(a.centerlines));

  std::ostringstream out;
  out << "timestamp_ms,x,y,lat,lon" << (dist.empty() ? "" : ",centerline_dist_m") << '\n';
  for (std::size_t i = 0; i < corrected.size(); ++i) {
    const auto& p = corrected.points()[i];
    const auto g = from_mercator(p);
    out << corrected.timestamps()[i] << ',' << format_double(p.x) << ',' << format_double(p.y) << ','
        << format_double(g.lat) << ',' << format_double(g.lon);
    if (!dist.empty()) out << ',' << format_double(dist[i]);
    out << '\n';
  }
  emit(a.output, out.str());
  return 0;
}

// ---------------------------------------------------------------------------

struct NoiseArgs {
  std::string track, centerlines, output;
  double bin_width = 1.0;
};

int run_noise(const NoiseArgs& a) {
  const auto d = distance_to_centerline(load_trajectory_file(a.track), load_centerlines_geojson(a.centerlines));
  const auto h = noise_histogram(d, a.bin_width);
  std::ostringstream out;
  out << "bin_lower_m,bin_upper_m,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    out << format_double(static_cast<double>(k) * h.bin_width) << ','
        << format_double(static_cast<double>(k + 1) * h.bin_width) << ',' << h.counts[k] << '\n';
  }
  emit(a.output, out.str());
  return 0;
}

// ---------------------------------------------------------------------------

struct ImportArgs {
  std::string gps, gaze, data_dir, id, split;
};

int run_import(const ImportArgs& a) {
  if (!SessionService::valid_id(a.id) || a.id == "manifest") throw ConfigError("import: invalid session id '" + a.id + "'");
  Session s;
  s.session_id = a.id;
  s.raw_track = load_gps_csv(a.gps);
  if (!a.gaze.empty()) s.gaze = load_gaze_csv(a.gaze);
  if (!a.split.empty()) s.split = split_from_string(a.split);
  fs::create_directories(a.data_dir);
  save_session(fs::path(a.data_dir) / (a.id + ".json"), s);
  if (s.split) {
    const auto manifest_path = fs::path(a.data_dir) / "manifest.json";
    Manifest m = fs::exists(manifest_path) ? load_manifest(manifest_path) : Manifest{};
    m[a.id] = *s.split;
    save_manifest(manifest_path, m);
  }
  std::cout << "imported " << a.id << " (" << s.raw_track.size() << " fixes)\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir = "data";
  std::string cors_origin = "*";
};

int run_serve(const ServeArgs& a) {
  SessionService service(a.data_dir);
  httplib::Server server;
  register_routes(server, service, a.cors_origin);
  std::cerr << "serving " << a.data_dir << " on http://" << a.host << ':' << a.port << '\n';
  if (!server.listen(a.host, a.port)) {
    std::cerr << "error: cannot listen on " << a.host << ':' << a.port << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory complexity, forecasting metrics, gaze fixations and GPS correction"};
  app.require_subcommand(1);

  PciArgs pci_args;
  auto* pci_cmd = app.add_subcommand("pci", "Per-window PCI of a trajectory");
  pci_cmd->add_option("--track", pci_args.track, "GPS CSV, plane CSV or session JSON")->required()->check(CLI::ExistingFile);
  pci_cmd->add_option("-o,--output", pci_args.output, "Window CSV (default stdout)");
  pci_cmd->add_option("--profile", pci_args.profile, "Also write the per-point mean PCI profile CSV");
  pci_cmd->add_option("--profile-stride-secs", pci_args.profile_stride, "Window stride of the profile")->capture_default_str();
  add_sampler_options(pci_cmd, pci_args.sampler);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against a ground-truth session");
  eval_cmd->add_option("--session", eval_args.session, "Ground truth: session JSON or trajectory CSV")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--predictions", eval_args.predictions, "CSV window_id,step,x,y")->check(CLI::ExistingFile);
  eval_cmd->add_option("--baseline", eval_args.baseline, "Score a built-in baseline instead: linear|stationary");
  eval_cmd->add_option("--json", eval_args.json_out, "Write the JSON report here");
  eval_cmd->add_option("-o,--output", eval_args.table_out, "Text table (default stdout)");
  eval_cmd->add_option("--pci-threshold", eval_args.threshold, "High-PCI filter threshold in meters")->capture_default_str();
  add_sampler_options(eval_cmd, eval_args.sampler);

  FixationArgs fx_args;
  auto* fx_cmd = app.add_subcommand("fixations", "Dispersion-threshold fixation detection");
  fx_cmd->add_option("--gaze", fx_args.gaze, "Gaze CSV timestamp_ms,x_px,y_px")->required()->check(CLI::ExistingFile);
  fx_cmd->add_option("-o,--output", fx_args.output, "Fixation CSV (default stdout)");
  fx_cmd->add_option("--min-duration-ms", fx_args.cfg.min_duration_ms)->capture_default_str();
  fx_cmd->add_option("--max-duration-ms", fx_args.cfg.max_duration_ms)->capture_default_str();
  fx_cmd->add_option("--dispersion-deg", fx_args.cfg.dispersion_deg)->capture_default_str();
  fx_cmd->add_option("--deg-per-pixel", fx_args.cfg.deg_per_pixel)->capture_default_str();
  fx_cmd->add_option("--downsample-fps", fx_args.downsample_fps, "Median-downsample before detection");

  CorrectArgs corr_args;
  auto* corr_cmd = app.add_subcommand("correct", "Spline-correct a raw track through markers");
  corr_cmd->add_option("--track", corr_args.track, "Raw GPS CSV or session JSON")->required()->check(CLI::ExistingFile);
  corr_cmd->add_option("--markers", corr_args.markers, "Markers JSON")->required()->check(CLI::ExistingFile);
  corr_cmd->add_option("--centerlines", corr_args.centerlines, "GeoJSON; adds a distance column")->check(CLI::ExistingFile);
  corr_cmd->add_option("-o,--output", corr_args.output, "Corrected CSV (default stdout)");

  NoiseArgs noise_args;
  auto* noise_cmd = app.add_subcommand("noise", "Histogram of distances to lane centerlines");
  noise_cmd->add_option("--track", noise_args.track)->required()->check(CLI::ExistingFile);
  noise_cmd->add_option("--centerlines", noise_args.centerlines, "GeoJSON LineStrings")->required()->check(CLI::ExistingFile);
  noise_cmd->add_option("--bin-width", noise_args.bin_width, "Meters")->capture_default_str();
  noise_cmd->add_option("-o,--output", noise_args.output);

  ImportArgs import_args;
  auto* import_cmd = app.add_subcommand("import", "Create a session from a GPS CSV");
  import_cmd->add_option("--gps", import_args.gps)->required()->check(CLI::ExistingFile);
  import_cmd->add_option("--gaze", import_args.gaze)->check(CLI::ExistingFile);
  import_cmd->add_option("--id", import_args.id)->required();
  import_cmd->add_option("--split", import_args.split)->check(CLI::IsMember({"train", "val", "test"}));
  import_cmd->add_option("--data-dir", import_args.data_dir)->required();

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run the annotation service");
  serve_cmd->add_option("--port", serve_args.port)->envname("TRAJKIT_PORT")->capture_default_str();
  serve_cmd->add_option("--host", serve_args.host)->capture_default_str();
  serve_cmd->add_option("--data-dir", serve_args.data_dir)->capture_default_str();
  serve_cmd->add_option("--cors-origin", serve_args.cors_origin)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*pci_cmd) return run_pci(pci_args);
    if (*eval_cmd) return run_eval(eval_args);
    if (*fx_cmd) return run_fixations(fx_args);
    if (*corr_cmd) return run_correct(corr_args);
    if (*noise_cmd) return run_noise(noise_args);
    if (*import_cmd) return run_import(import_args);
    if (*serve_cmd) return run_serve(serve_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
