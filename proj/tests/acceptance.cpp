// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "trajkit/correction.hpp"
#include "trajkit/frechet.hpp"
#include "trajkit/gaze.hpp"
#include "trajkit/geodesy.hpp"
#include "trajkit/ingest.hpp"
#include "trajkit/metrics.hpp"
#include "trajkit/pci.hpp"
#include "trajkit/spline.hpp"
#include "trajkit/trajectory.hpp"

using namespace trajkit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

Trajectory uniform_track(const std::vector<PlanePoint>& ps, double fps = 5.0) {
  std::vector<Millis> ts(ps.size());
  for (std::size_t k = 0; k < ps.size(); ++k) ts[k] = grid_offset(k, fps);
  return Trajectory(ts, ps);
}

Trajectory straight_input(PlanePoint end, double heading, double speed, std::size_t n = 40) {
  std::vector<PlanePoint> ps(n);
  const double step = speed / 5.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double back = static_cast<double>(n - 1 - k) * step;
    ps[k] = {end.x - back * std::cos(heading), end.y - back * std::sin(heading)};
  }
  return uniform_track(ps);
}

// --------------------------------------------------------------------------

Outcome frechet_oracle() {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<std::size_t> len(1, 6);
  std::uniform_real_distribution<double> c(-50.0, 50.0);
  double worst = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 1000; ++i) {
    std::vector<PlanePoint> p(len(rng)), q(len(rng));
    for (auto& v : p) v = {c(rng), c(rng)};
    for (auto& v : q) v = {c(rng), c(rng)};
    worst = std::max(worst, std::abs(discrete_frechet(p, q) - oracle::frechet_brute_force(p, q)));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string d = "max err " + num(worst) + " m, " + num(secs) + " s";
  if (worst > 1e-9) return fail(d);
  if (secs >= 5.0) return fail(d);
  return {true, d};
}

Outcome pci_zero_law() {
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> pos(-1e4, 1e4), vel(-30.0, 30.0);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const PlanePoint start{pos(rng), pos(rng)};
    const PlanePoint v{vel(rng), vel(rng)};
    std::vector<PlanePoint> all(70);
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = start + (static_cast<double>(k) / 5.0) * v;
    const auto track = uniform_track(all);
    worst = std::max(worst, pci(track.slice(0, 40), track.slice(40, 30)).value);
  }
  const std::string d = "max pci " + num(worst) + " m";
  return worst <= 1e-9 ? Outcome{true, d} : fail(d);
}

Outcome linear_baseline_identity() {
  std::mt19937_64 rng(1003);
  std::normal_distribution<double> acc(0.0, 1.5);
  std::size_t windows = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<PlanePoint> ps(300);
    PlanePoint p{0, 0}, v{8, 0};
    for (auto& q : ps) {
      q = p;
      v = v + 0.2 * PlanePoint{acc(rng), acc(rng)};
      p = p + 0.2 * v;
    }
    for (const auto& w : sliding_windows(uniform_track(ps), SamplerConfig{})) {
      const auto base = baseline_linear(w);
      const double a = discrete_frechet(w.target.points(), base.points());
      const double b = pci(w.input, w.target).value;
      if (a != b) return fail("window " + std::to_string(windows) + ": " + num(a) + " != " + num(b));
      ++windows;
    }
  }
  return {true, std::to_string(windows) + " windows bit-identical"};
}

Outcome discount_weight_claim() {
  const SamplerConfig cfg;
  const auto n = cfg.target_steps();
  const double w = discount_weight(0.97, n);
  const std::string d = "N=" + std::to_string(n) + ", weight " + num(w);
  if (n != 30) return fail(d);
  return std::abs(w - 0.4010) <= 1e-4 ? Outcome{true, d} : fail(d);
}

Outcome auxiliary_proportion() {
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> e(-6.0, 6.0), r(0.01, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double lt = std::pow(10.0, e(rng)), lv = std::pow(10.0, e(rng)), rho = r(rng);
    const auto b = auxiliary_weight(lt, lv, rho);
    worst = std::max(worst, std::abs(b.alpha_v * lv / lt - rho));
  }
  const std::string d = "max deviation " + num(worst);
  return worst <= 1e-12 ? Outcome{true, d} : fail(d);
}

Outcome ade_fde_cases() {
  const std::vector<PlanePoint> gt = {{0, 0}, {0, 0}};
  const std::vector<PlanePoint> half = {{0, 0}, {1, 0}};
  const std::vector<PlanePoint> five = {{0, 0}, {3, 4}};
  const std::vector<PlanePoint> single_p = {{1, 2}}, single_g = {{4, 6}};
  if (ade(half, gt) != 0.5) return fail("ADE of [(0,0),(1,0)] vs zeros");
  if (fde(five, gt) != 5.0) return fail("FDE of [(0,0),(3,4)] vs zeros");
  if (ade(five, five) != 0.0 || fde(five, five) != 0.0) return fail("identical sequences");
  if (fde(single_p, single_g) != ade(single_p, single_g)) return fail("length-1 FDE == ADE");

  std::mt19937_64 rng(1006);
  std::uniform_real_distribution<double> c(-100.0, 100.0);
  std::uniform_int_distribution<std::size_t> len(1, 60);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    std::vector<PlanePoint> a(len(rng)), b;
    for (auto& p : a) p = {c(rng), c(rng)};
    for (std::size_t k = 0; k < a.size(); ++k) b.push_back({c(rng), c(rng)});
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) sum += std::hypot(a[k].x - b[k].x, a[k].y - b[k].y);
    const double ref_ade = sum / static_cast<double>(a.size());
    const double ref_fde = std::hypot(a.back().x - b.back().x, a.back().y - b.back().y);
    worst = std::max({worst, std::abs(ade(a, b) - ref_ade), std::abs(fde(a, b) - ref_fde)});
  }
  const std::string d = "hand cases exact, loop oracle max err " + num(worst);
  return worst <= 1e-12 ? Outcome{true, d} : fail(d);
}

double generated_pci(double speed, double angle_deg) {
  const PlanePoint end{250.0, -40.0};
  const double heading = 0.7;
  const auto input = straight_input(end, heading, speed);
  const auto target = generate_target(end, heading, {speed, angle_deg, CurvatureProfile::constant, 6.0}, 5.0,
                                      input.end_time());
  return pci(input, target).value;
}

Outcome generator_ordering() {
  const std::vector<double> angles = {0, 30, 60, 90, 135, 180};
  std::string d = "angles:";
  double prev = -1.0;
  for (double a : angles) {
    const double v = generated_pci(10.0, a);
    d += " " + num(v);
    if (!(v > prev)) return fail(d);
    prev = v;
  }
  d += "; speed 5/10/20 at 45 deg:";
  prev = -1.0;
  for (double s : {5.0, 10.0, 20.0}) {
    const double v = generated_pci(s, 45.0);
    d += " " + num(v);
    if (!(v > prev)) return fail(d);
    prev = v;
  }
  return {true, d};
}

Outcome window_counts() {
  auto count = [](std::size_t n) {
    std::vector<PlanePoint> ps(n);
    for (std::size_t k = 0; k < n; ++k) ps[k] = {2.0 * static_cast<double>(k), 0.0};
    return sliding_windows(uniform_track(ps), SamplerConfig{}).size();
  };
  const auto a = count(70), b = count(80), c = count(69);
  const std::string d = "14 s -> " + std::to_string(a) + ", 16 s -> " + std::to_string(b) + ", 13.8 s -> " +
                        std::to_string(c);
  return a == 1 && b == 2 && c == 0 ? Outcome{true, d} : fail(d);
}

Outcome fixation_oracle() {
  std::mt19937_64 rng(1009);
  const FixationConfig cfg;
  std::size_t total = 0;
  for (int i = 0; i < 500; ++i) {
    const auto s = oracle::random_gaze_stream(rng, 10.0);
    const auto fx = detect_fixations(s, cfg);
    const auto ref = oracle::fixations_brute_force(s, cfg.min_duration_ms, cfg.max_duration_ms, cfg.dispersion_deg,
                                                   cfg.deg_per_pixel);
    if (fx.size() != ref.size()) return fail("stream " + std::to_string(i) + ": fixation count differs");
    for (std::size_t k = 0; k < fx.size(); ++k) {
      const auto& f = fx[k];
      if (f.start_ms != s[ref[k].first].timestamp || f.end_ms != s[ref[k].last].timestamp) {
        return fail("stream " + std::to_string(i) + ": interval " + std::to_string(k) + " differs");
      }
      if (f.duration_ms() < 80 || f.duration_ms() > 1000) return fail("duration bound violated");
      double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
      for (std::size_t j = ref[k].first; j <= ref[k].last; ++j) {
        x0 = std::min(x0, s[j].x), x1 = std::max(x1, s[j].x);
        y0 = std::min(y0, s[j].y), y1 = std::max(y1, s[j].y);
      }
      if (((x1 - x0) + (y1 - y0)) * 0.075 > 1.5) return fail("dispersion bound violated");
    }
    total += fx.size();
  }
  return {true, std::to_string(total) + " fixations over 500 streams"};
}

Outcome spline_correctness() {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> c(-50.0, 50.0);
  std::uniform_real_distribution<double> gap(0.5, 4.0);
  double knot_err = 0.0, boundary = 0.0, c2_rel = 0.0, oracle_err = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + trial % 10;
    std::vector<double> t(n), y(n);
    double at = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      t[k] = at;
      y[k] = c(rng);
      at += gap(rng);
    }
    const NaturalCubicSpline s(t, y);
    const oracle::DenseNaturalSpline ref(t, y);
    for (std::size_t k = 0; k < n; ++k) knot_err = std::max(knot_err, std::abs(s(t[k]) - y[k]));
    boundary = std::max({boundary, std::abs(s.second_derivative(t.front())), std::abs(s.second_derivative(t.back()))});
    for (std::size_t k = 1; k + 1 < n; ++k) {
      // one-sided limits of S'' at the knot: S'' is linear on each piece, so
      // two interior samples extrapolate to the limit exactly
      const double hl = 0.1 * (t[k] - t[k - 1]), hr = 0.1 * (t[k + 1] - t[k]);
      const double left = 2.0 * s.second_derivative(t[k] - hl) - s.second_derivative(t[k] - 2.0 * hl);
      const double right = 2.0 * s.second_derivative(t[k] + hr) - s.second_derivative(t[k] + 2.0 * hr);
      const double ref_left = ref.second_derivative_from_segment(k - 1, t[k]);
      const double scale = std::max(1.0, std::abs(ref_left));
      c2_rel = std::max({c2_rel, std::abs(left - right) / scale, std::abs(left - ref_left) / scale});
    }
    for (double q = t.front(); q <= t.back(); q += 0.173) oracle_err = std::max(oracle_err, std::abs(s(q) - ref(q)));
  }
  const std::string d = "knots " + num(knot_err) + " m, boundary S'' " + num(boundary) + ", C2 rel " + num(c2_rel) +
                        ", vs dense solve " + num(oracle_err) + " m";
  if (knot_err > 1e-9 || boundary > 1e-6 || c2_rel > 1e-6 || oracle_err > 1e-9) return fail(d);
  return {true, d};
}

Outcome geodesy_round_trip() {
  std::mt19937_64 rng(1011);
  std::uniform_real_distribution<double> lat(-kMaxMercatorLatitude, kMaxMercatorLatitude), lon(-180.0, 180.0);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const GeoPoint g{lat(rng), lon(rng)};
    const auto back = from_mercator(to_mercator(g));
    worst = std::max({worst, std::abs(back.lat - g.lat), std::abs(back.lon - g.lon)});
  }
  const std::string d = "max err " + num(worst) + " deg";
  return worst <= 1e-9 ? Outcome{true, d} : fail(d);
}

Outcome median_robustness() {
  std::mt19937_64 rng(1012);
  std::uniform_real_distribution<double> wild(-1e6, 1e6);
  std::uniform_int_distribution<int> side(0, 2);
  std::size_t bins = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double cx = wild(rng), cy = wild(rng);
    GazeStream s;
    for (Millis t = 0; t < 5000; t += 5) s.push_back({t, cx, cy});
    // corrupt floor(0.49 n) samples of every 200 ms bin: all high, all low, or mixed
    const int mode = side(rng);
    for (std::size_t b = 0; b < s.size(); b += 40) {
      std::vector<std::size_t> idx(40);
      for (std::size_t k = 0; k < 40; ++k) idx[k] = b + k;
      std::shuffle(idx.begin(), idx.end(), rng);
      for (std::size_t k = 0; k < 19; ++k) {
        auto& g = s[idx[k]];
        const double off = std::abs(wild(rng)) + 1.0;
        const double sign = mode == 0 ? 1.0 : mode == 1 ? -1.0 : (k % 2 ? 1.0 : -1.0);
        g.x = cx + sign * off;
        g.y = cy - sign * off;
      }
    }
    for (const auto& g : median_downsample(s, 5.0)) {
      if (g.x != cx || g.y != cy) return fail("bin at " + std::to_string(g.timestamp) + " moved");
      ++bins;
    }
  }
  return {true, std::to_string(bins) + " bins with 19/40 outliers unchanged"};
}

// --------------------------------------------------------------------------

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

Outcome cli_byte_stable() {
  const std::string cli = TRAJKIT_CLI_PATH;
  const fs::path fx = TRAJKIT_FIXTURES_DIR;
  const fs::path work = fs::temp_directory_path() / ("trajkit_accept_" + std::to_string(std::random_device{}()));
  fs::create_directories(work);

  struct Command {
    std::string name;
    std::string args;
    std::vector<std::string> outputs;
  };
  const std::vector<Command> commands = {
      {"pci", "pci --track " + shell_quote((fx / "drive.csv").string()) + " -o {0} --profile {1}",
       {"windows.csv", "profile.csv"}},
      {"eval", "eval --session " + shell_quote((fx / "drive.json").string()) + " --predictions " +
                   shell_quote((fx / "predictions.csv").string()) + " --json {0} -o {1}",
       {"report.json", "report.txt"}},
      {"fixations", "fixations --gaze " + shell_quote((fx / "gaze.csv").string()) + " -o {0}", {"fixations.csv"}},
      {"correct", "correct --track " + shell_quote((fx / "drive.csv").string()) + " --markers " +
                      shell_quote((fx / "markers.json").string()) + " --centerlines " +
                      shell_quote((fx / "centerlines.geojson").string()) + " -o {0}",
       {"corrected.csv"}},
  };

  std::string detail;
  bool ok = true;
  for (const auto& c : commands) {
    std::vector<std::string> runs[2];
    for (int r = 0; r < 2; ++r) {
      std::string args = c.args;
      for (std::size_t o = 0; o < c.outputs.size(); ++o) {
        const auto path = work / ("run" + std::to_string(r) + "_" + c.outputs[o]);
        const std::string key = "{" + std::to_string(o) + "}";
        args.replace(args.find(key), key.size(), shell_quote(path.string()));
      }
      const int rc = std::system((shell_quote(cli) + " " + args).c_str());
      if (rc != 0) {
        ok = false;
        detail += c.name + ": exit " + std::to_string(rc) + "; ";
        break;
      }
      for (const auto& o : c.outputs) runs[r].push_back(detail::read_file(work / ("run" + std::to_string(r) + "_" + o)));
    }
    if (runs[0].size() != c.outputs.size() || runs[1].size() != c.outputs.size()) continue;
    bool same = runs[0] == runs[1];
    bool nonempty = true;
    for (const auto& text : runs[0]) nonempty = nonempty && std::count(text.begin(), text.end(), '\n') >= 2;
    if (!same || !nonempty) {
      ok = false;
      detail += c.name + (same ? ": empty output; " : ": outputs differ; ");
    } else {
      detail += c.name + " ok; ";
    }
  }
  fs::remove_all(work);
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Frechet distance equals exhaustive coupling enumeration", frechet_oracle},
      {"PCI is zero for constant-velocity continuations", pci_zero_law},
      {"Linear baseline Frechet equals PCI on every window", linear_baseline_identity},
      {"Final discount weight 0.97^30 = 0.4010", discount_weight_claim},
      {"Auxiliary weight keeps rho proportion", auxiliary_proportion},
      {"ADE/FDE hand cases and loop oracle", ade_fde_cases},
      {"Synthetic PCI increases with turn angle and speed", generator_ordering},
      {"Sliding window counts for 14 s / 16 s / 13.8 s tracks", window_counts},
      {"Fixation detection equals brute-force oracle", fixation_oracle},
      {"Natural cubic spline knots, boundary and C2", spline_correctness},
      {"Mercator round trip on 1e5 points", geodesy_round_trip},
      {"Median downsampling ignores minority outliers", median_robustness},
      {"CLI outputs are byte-stable across runs", cli_byte_stable},
  };

  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    std::printf("[%s] %s (%s)\n", o.ok ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    if (!o.ok) ++failures;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
