#ifndef TRAJKIT_PCI_HPP
#define TRAJKIT_PCI_HPP

// Path Complexity Index: Fréchet distance between an observed target and the
// constant-velocity continuation of the input.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "trajkit/error.hpp"
#include "trajkit/frechet.hpp"
#include "trajkit/geodesy.hpp"
#include "trajkit/trajectory.hpp"

namespace trajkit {

/// Reporting bins, meters: [0,10), [10,20), [20,40), [40,inf).
inline constexpr std::array<double, 4> kPciBinLowerEdges = {0.0, 10.0, 20.0, 40.0};
inline constexpr double kDefaultPciThreshold = 20.0;

inline std::size_t pci_bin(double pci) {
  std::size_t bin = 0;
  for (std::size_t b = 1; b < kPciBinLowerEdges.size(); ++b) {
    if (pci >= kPciBinLowerEdges[b]) bin = b;
  }
  return bin;
}

inline std::string pci_bin_label(std::size_t bin) {
  static const std::array<const char*, 4> labels = {"[0,10)", "[10,20)", "[20,40)", "[40,inf)"};
  return labels.at(bin);
}

struct PciResult {
  double value = 0.0;
  Trajectory simple_trajectory;
};

/// Continues `input` along v_final = last - second-to-last point:
/// point k = last + k * v_final for k = 1..n_steps. Timestamps continue the
/// input's final step.
inline Trajectory simple_extrapolation(const Trajectory& input, std::size_t n_steps) {
  if (input.size() < 2) {
    throw SizeError("simple_extrapolation: input needs at least 2 samples");
  }
  if (n_steps == 0) {
    throw SizeError("simple_extrapolation: n_steps must be positive");
  }
  const auto ts = input.timestamps();
  const auto ps = input.points();
  const std::size_t last = input.size() - 1;
  const Millis step = ts[last] - ts[last - 1];
  const PlanePoint v_final = ps[last] - ps[last - 1];

  std::vector<Millis> out_t(n_steps);
  std::vector<PlanePoint> out_p(n_steps);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const double kk = static_cast<double>(k);
    out_t[k - 1] = ts[last] + static_cast<Millis>(k) * step;
    out_p[k - 1] = {ps[last].x + kk * v_final.x, ps[last].y + kk * v_final.y};
  }
  return Trajectory(std::move(out_t), std::move(out_p));
}

inline PciResult pci(const Trajectory& input, const Trajectory& target) {
  Trajectory simple = simple_extrapolation(input, target.size());
  const double value = discrete_frechet(target.points(), simple.points());
  return PciResult{value, std::move(simple)};
}

enum class CurvatureProfile { constant, ease_in, ease_out };

/// Parameters of a synthetic turning target.
struct SyntheticSpec {
  double speed = 10.0;       // m/s
  double turn_angle = 0.0;   // degrees of total heading change, signed (positive = left)
  CurvatureProfile curvature_profile = CurvatureProfile::constant;
  double duration = 6.0;     // seconds
};

namespace detail {

// Fraction of the total heading change accumulated at normalized time u.
inline double heading_fraction(CurvatureProfile profile, double u) {
  switch (profile) {
    case CurvatureProfile::constant: return u;
    case CurvatureProfile::ease_in: return u * u;
    case CurvatureProfile::ease_out: return 1.0 - (1.0 - u) * (1.0 - u);
  }
  return u;
}

}  // namespace detail

/// Constant-speed path leaving `input_end` at `heading` (radians, from +x)
/// and turning by spec.turn_angle over spec.duration. Each step uses the
/// heading at the middle of its interval. The start point is not included;
/// the first sample is one step ahead at start_ms + 1000/fps.
inline Trajectory generate_target(const PlanePoint& input_end, double heading,
                                  const SyntheticSpec& spec, double fps, Millis start_ms = 0) {
  if (!(spec.speed > 0.0) || !(spec.duration > 0.0) || !std::isfinite(spec.turn_angle)) {
    throw DomainError("generate_target: speed and duration must be positive");
  }
  if (!(fps > 0.0)) {
    throw DomainError("generate_target: fps must be positive");
  }
  const auto n = static_cast<std::size_t>(std::llround(spec.duration * fps));
  if (n == 0) {
    throw SizeError("generate_target: duration shorter than one step");
  }
  const double turn = spec.turn_angle * std::numbers::pi / 180.0;
  const double step_len = spec.speed / fps;

  std::vector<Millis> ts(n);
  std::vector<PlanePoint> ps(n);
  PlanePoint cur = input_end;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    const double theta = heading + turn * detail::heading_fraction(spec.curvature_profile, u);
    cur.x += step_len * std::cos(theta);
    cur.y += step_len * std::sin(theta);
    ps[k] = cur;
    ts[k] = start_ms + grid_offset(k + 1, fps);
  }
  return Trajectory(std::move(ts), std::move(ps));
}

struct WindowPci {
  Millis window_start_ms = 0;
  double pci_m = 0.0;
};

/// PCI of every window that sliding_windows cuts from `traj`.
inline std::vector<WindowPci> window_pcis(const Trajectory& traj, const SamplerConfig& cfg) {
  std::vector<WindowPci> out;
  for (const auto& w : sliding_windows(traj, cfg)) {
    out.push_back({w.input.start_time(), pci(w.input, w.target).value});
  }
  return out;
}

/// Per-point mean PCI for a heatmap. Windows (cfg input/target lengths,
/// `stride_secs` stride) attribute their PCI to every target sample; each
/// sample averages what it received. Samples no target covers stay empty.
inline std::vector<std::optional<double>> pci_profile(const Trajectory& traj, SamplerConfig cfg,
                                                      double stride_secs = 1.0) {
  cfg.stride_secs = stride_secs;
  std::vector<double> sum(traj.size(), 0.0);
  std::vector<std::size_t> count(traj.size(), 0);
  for (const auto& w : sliding_windows(traj, cfg)) {
    const double value = pci(w.input, w.target).value;
    const std::size_t first = w.first_index + w.input.size();
    for (std::size_t i = first; i < first + w.target.size(); ++i) {
      sum[i] += value;
      ++count[i];
    }
  }
  std::vector<std::optional<double>> out(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (count[i] > 0) out[i] = sum[i] / static_cast<double>(count[i]);
  }
  return out;
}

}  // namespace trajkit

#endif  // TRAJKIT_PCI_HPP
