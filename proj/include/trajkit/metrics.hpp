#ifndef TRAJKIT_METRICS_HPP
#define TRAJKIT_METRICS_HPP

// Displacement metrics, discounted losses, naive baselines and
// PCI-stratified reporting.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <ranges>
#include <span>
#include <string>
#include <vector>

#include "trajkit/error.hpp"
#include "trajkit/geodesy.hpp"
#include "trajkit/pci.hpp"
#include "trajkit/trajectory.hpp"

namespace trajkit {

namespace detail {

inline void require_same_nonempty(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw SizeError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                    std::to_string(b) + ")");
  }
  if (a == 0) {
    throw SizeError(std::string(what) + ": empty sequence");
  }
}

}  // namespace detail

/// Mean Euclidean displacement over all steps.
inline double ade(std::span<const PlanePoint> pred, std::span<const PlanePoint> gt) {
  detail::require_same_nonempty(pred.size(), gt.size(), "ade");
  double sum = 0.0;
  for (std::size_t t = 0; t < pred.size(); ++t) sum += distance(pred[t], gt[t]);
  return sum / static_cast<double>(pred.size());
}

/// Displacement at the final step.
inline double fde(std::span<const PlanePoint> pred, std::span<const PlanePoint> gt) {
  detail::require_same_nonempty(pred.size(), gt.size(), "fde");
  return distance(pred.back(), gt.back());
}

/// Displacement at 1-based step horizon_secs * fps, so the full horizon
/// coincides with fde.
inline double fde_at(std::span<const PlanePoint> pred, std::span<const PlanePoint> gt,
                     double horizon_secs, double fps) {
  detail::require_same_nonempty(pred.size(), gt.size(), "fde_at");
  const double raw = horizon_secs * fps;
  const double k = std::round(raw);
  if (std::abs(raw - k) > 1e-9 || k < 1.0) {
    throw RangeError("fde_at: horizon must be a positive whole number of steps");
  }
  if (k > static_cast<double>(pred.size())) {
    throw RangeError("fde_at: horizon of " + std::to_string(horizon_secs) +
                     " s exceeds the prediction length");
  }
  const auto idx = static_cast<std::size_t>(k) - 1;
  return distance(pred[idx], gt[idx]);
}

inline double ade(const Trajectory& pred, const Trajectory& gt) { return ade(pred.points(), gt.points()); }
inline double fde(const Trajectory& pred, const Trajectory& gt) { return fde(pred.points(), gt.points()); }
inline double fde_at(const Trajectory& pred, const Trajectory& gt, double horizon_secs, double fps) {
  return fde_at(pred.points(), gt.points(), horizon_secs, fps);
}

struct LossConfig {
  double gamma = 0.97;
  double rho_v = 0.5;

  void validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("LossConfig: gamma must lie in (0, 1)");
    if (!(rho_v >= 0.0)) throw ConfigError("LossConfig: rho_v must be non-negative");
  }
};

/// Weight gamma^i of 1-based step i.
inline double discount_weight(double gamma, std::size_t step) {
  return std::pow(gamma, static_cast<double>(step));
}

namespace detail {

inline double squared_error(const PlanePoint& a, const PlanePoint& b) { return squared_distance(a, b); }

template <std::ranges::sized_range R>
  requires std::convertible_to<std::ranges::range_value_t<R>, double>
double squared_error(const R& a, const R& b) {
  if (std::ranges::size(a) != std::ranges::size(b)) {
    throw SizeError("future_discounted_loss: feature dimension mismatch");
  }
  double s = 0.0;
  auto ib = std::ranges::begin(b);
  for (auto ia = std::ranges::begin(a); ia != std::ranges::end(a); ++ia, ++ib) {
    const double d = static_cast<double>(*ia) - static_cast<double>(*ib);
    s += d * d;
  }
  return s;
}

}  // namespace detail

/// sum_{i=1..N} gamma^i * ||pred_i - gt_i||^2, squared Euclidean norm per
/// step. Elements are planar points or feature vectors.
template <typename T>
double future_discounted_loss(std::span<const T> pred, std::span<const T> gt, double gamma) {
  detail::require_same_nonempty(pred.size(), gt.size(), "future_discounted_loss");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw DomainError("future_discounted_loss: gamma must lie in (0, 1)");
  }
  double loss = 0.0;
  double w = 1.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    w *= gamma;
    loss += w * detail::squared_error(pred[i], gt[i]);
  }
  return loss;
}

template <typename T>
double future_discounted_loss(const std::vector<T>& pred, const std::vector<T>& gt, double gamma) {
  return future_discounted_loss(std::span<const T>(pred), std::span<const T>(gt), gamma);
}

inline double future_discounted_loss(const Trajectory& pred, const Trajectory& gt, double gamma) {
  return future_discounted_loss(pred.points(), gt.points(), gamma);
}

struct AuxiliaryBalance {
  double alpha_v = 0.0;
  double combined = 0.0;
};

/// alpha_V = rho_V * |L_T| / |L_V|, combined = L_T + alpha_V * L_V. A zero
/// auxiliary loss gets alpha_V = 0.
inline AuxiliaryBalance auxiliary_weight(double loss_t, double loss_v, double rho_v) {
  if (!(rho_v >= 0.0) || !std::isfinite(rho_v)) {
    throw DomainError("auxiliary_weight: rho_v must be finite and non-negative");
  }
  if (!std::isfinite(loss_t) || !std::isfinite(loss_v)) {
    throw DomainError("auxiliary_weight: non-finite loss");
  }
  if (loss_v == 0.0) return {0.0, loss_t};
  const double alpha = rho_v * std::abs(loss_t) / std::abs(loss_v);
  return {alpha, loss_t + alpha * loss_v};
}

/// Repeats the last input point over the target's timestamps.
inline Trajectory baseline_stationary(const WindowPair& window) {
  const auto ts = window.target.timestamps();
  return Trajectory(std::vector<Millis>(ts.begin(), ts.end()),
                    std::vector<PlanePoint>(ts.size(), window.input.back()));
}

/// Constant final velocity; identical to simple_extrapolation.
inline Trajectory baseline_linear(const WindowPair& window) {
  return simple_extrapolation(window.input, window.target.size());
}

using WindowId = std::int64_t;

struct SampleResult {
  WindowId window_id = 0;
  double ade = 0.0;
  double fde = 0.0;
  std::map<int, double> fde_at;  // whole-second horizon -> meters
  double pci = 0.0;
};

/// Metrics of one prediction against its window. Horizons that do not fit
/// the target length are skipped.
inline SampleResult evaluate_window(WindowId id, const Trajectory& prediction, const WindowPair& window,
                                    double fps, std::span<const int> horizons_secs) {
  SampleResult r;
  r.window_id = id;
  r.ade = ade(prediction, window.target);
  r.fde = fde(prediction, window.target);
  for (int h : horizons_secs) {
    if (static_cast<double>(h) * fps <= static_cast<double>(window.target.size())) {
      r.fde_at[h] = fde_at(prediction, window.target, h, fps);
    }
  }
  r.pci = pci(window.input, window.target).value;
  return r;
}

struct Aggregate {
  std::size_t count = 0;
  std::optional<double> ade;
  std::optional<double> fde;
  std::map<int, double> fde_at;
};

struct BinAggregate {
  std::string label;
  double lower = 0.0;
  Aggregate stats;
};

struct EvalReport {
  double pci_threshold = kDefaultPciThreshold;
  Aggregate overall;
  Aggregate filtered;  // samples with pci >= pci_threshold
  std::vector<BinAggregate> bins;
  std::vector<SampleResult> samples;  // sorted by PCI bin, then window_id
};

namespace detail {

inline Aggregate aggregate(const std::vector<const SampleResult*>& subset) {
  Aggregate a;
  a.count = subset.size();
  if (subset.empty()) return a;
  double ade_sum = 0.0;
  double fde_sum = 0.0;
  std::map<int, double> h_sum;
  std::map<int, std::size_t> h_count;
  for (const auto* s : subset) {
    ade_sum += s->ade;
    fde_sum += s->fde;
    for (const auto& [h, v] : s->fde_at) {
      h_sum[h] += v;
      ++h_count[h];
    }
  }
  const auto n = static_cast<double>(subset.size());
  a.ade = ade_sum / n;
  a.fde = fde_sum / n;
  for (const auto& [h, v] : h_sum) a.fde_at[h] = v / static_cast<double>(h_count[h]);
  return a;
}

}  // namespace detail

inline EvalReport report(std::vector<SampleResult> samples, double pci_threshold = kDefaultPciThreshold) {
  std::ranges::sort(samples, [](const SampleResult& a, const SampleResult& b) {
    const auto ba = pci_bin(a.pci);
    const auto bb = pci_bin(b.pci);
    return ba != bb ? ba < bb : a.window_id < b.window_id;
  });

  EvalReport rep;
  rep.pci_threshold = pci_threshold;
  std::vector<const SampleResult*> all;
  std::vector<const SampleResult*> filtered;
  std::array<std::vector<const SampleResult*>, kPciBinLowerEdges.size()> per_bin;
  for (const auto& s : samples) {
    all.push_back(&s);
    if (s.pci >= pci_threshold) filtered.push_back(&s);
    per_bin[pci_bin(s.pci)].push_back(&s);
  }
  rep.overall = detail::aggregate(all);
  rep.filtered = detail::aggregate(filtered);
  for (std::size_t b = 0; b < per_bin.size(); ++b) {
    rep.bins.push_back({pci_bin_label(b), kPciBinLowerEdges[b], detail::aggregate(per_bin[b])});
  }
  rep.samples = std::move(samples);
  return rep;
}

}  // namespace trajkit

#endif  // TRAJKIT_METRICS_HPP
