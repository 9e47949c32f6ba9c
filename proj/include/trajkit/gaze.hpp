#ifndef TRAJKIT_GAZE_HPP
#define TRAJKIT_GAZE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "trajkit/error.hpp"
#include "trajkit/trajectory.hpp"

namespace trajkit {

/// Gaze position in scene-camera pixels.
struct GazeSample {
  Millis timestamp = 0;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const GazeSample&, const GazeSample&) = default;
};

using GazeStream = std::vector<GazeSample>;

struct Fixation {
  Millis start_ms = 0;
  Millis end_ms = 0;
  double cx = 0.0;
  double cy = 0.0;
  std::size_t sample_count = 0;

  Millis duration_ms() const noexcept { return end_ms - start_ms; }
  friend bool operator==(const Fixation&, const Fixation&) = default;
};

struct FixationConfig {
  Millis min_duration_ms = 80;
  Millis max_duration_ms = 1000;
  double dispersion_deg = 1.5;
  // Scene-camera calibration; 0.075 deg/px is roughly an 82 degree field over 1088 px.
  double deg_per_pixel = 0.075;

  void validate() const {
    if (!(min_duration_ms > 0 && min_duration_ms < max_duration_ms)) {
      throw ConfigError("FixationConfig: need 0 < min_duration_ms < max_duration_ms");
    }
    if (!(dispersion_deg > 0.0) || !(deg_per_pixel > 0.0)) {
      throw ConfigError("FixationConfig: dispersion_deg and deg_per_pixel must be positive");
    }
  }
};

inline void validate_stream(std::span<const GazeSample> stream) {
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (!std::isfinite(stream[i].x) || !std::isfinite(stream[i].y)) {
      throw DomainError("gaze stream: non-finite sample at index " + std::to_string(i));
    }
    if (i > 0 && stream[i].timestamp <= stream[i - 1].timestamp) {
      throw DomainError("gaze stream: timestamps not strictly increasing at index " + std::to_string(i));
    }
  }
}

/// I-DT (dispersion threshold) fixation detection.
///
/// From each start sample the window grows to the longest run whose
/// dispersion ((x range) + (y range)) * deg_per_pixel stays within
/// dispersion_deg and whose span stays within max_duration_ms. Runs spanning
/// at least min_duration_ms become a fixation and the sweep resumes after
/// them; otherwise the start advances by one sample. Stable gaze longer than
/// max_duration_ms therefore yields consecutive fixations.
inline std::vector<Fixation> detect_fixations(std::span<const GazeSample> stream,
                                              const FixationConfig& cfg = {}) {
  cfg.validate();
  validate_stream(stream);
  std::vector<Fixation> out;
  const std::size_t n = stream.size();
  std::size_t i = 0;
  while (i < n) {
    double min_x = stream[i].x, max_x = stream[i].x;
    double min_y = stream[i].y, max_y = stream[i].y;
    std::size_t j = i;
    while (j + 1 < n) {
      const auto& s = stream[j + 1];
      if (s.timestamp - stream[i].timestamp > cfg.max_duration_ms) break;
      const double nx0 = std::min(min_x, s.x), nx1 = std::max(max_x, s.x);
      const double ny0 = std::min(min_y, s.y), ny1 = std::max(max_y, s.y);
      if (((nx1 - nx0) + (ny1 - ny0)) * cfg.deg_per_pixel > cfg.dispersion_deg) break;
      min_x = nx0, max_x = nx1, min_y = ny0, max_y = ny1;
      ++j;
    }
    if (j > i && stream[j].timestamp - stream[i].timestamp >= cfg.min_duration_ms) {
      double sx = 0.0, sy = 0.0;
      for (std::size_t k = i; k <= j; ++k) {
        sx += stream[k].x;
        sy += stream[k].y;
      }
      const auto cnt = j - i + 1;
      out.push_back({stream[i].timestamp, stream[j].timestamp, sx / static_cast<double>(cnt),
                     sy / static_cast<double>(cnt), cnt});
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

/// Median downsampling onto bins of width 1000 / target_fps ms aligned to
/// t = 0. Each non-empty bin emits the per-coordinate lower median at the
/// bin's center timestamp. The lower median is an order statistic, so it
/// commutes with increasing relabelings of the values.
inline GazeStream median_downsample(std::span<const GazeSample> stream, double target_fps) {
  if (!(target_fps > 0.0) || !std::isfinite(target_fps)) {
    throw DomainError("median_downsample: target_fps must be positive");
  }
  validate_stream(stream);
  const double width = 1000.0 / target_fps;
  GazeStream out;
  std::vector<double> xs, ys;
  auto lower_median = [](std::vector<double>& v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
  };
  std::size_t i = 0;
  while (i < stream.size()) {
    const auto bin = static_cast<std::int64_t>(std::floor(static_cast<double>(stream[i].timestamp) / width));
    xs.clear();
    ys.clear();
    while (i < stream.size() &&
           static_cast<std::int64_t>(std::floor(static_cast<double>(stream[i].timestamp) / width)) == bin) {
      xs.push_back(stream[i].x);
      ys.push_back(stream[i].y);
      ++i;
    }
    const auto center = static_cast<Millis>(std::llround((static_cast<double>(bin) + 0.5) * width));
    out.push_back({center, lower_median(xs), lower_median(ys)});
  }
  return out;
}

/// Adds independent uniform noise in [-amplitude, amplitude] to each
/// coordinate. Deterministic for a given seed.
inline GazeStream inject_noise(std::span<const GazeSample> stream, double amplitude_px,
                               std::uint64_t seed) {
  if (!(amplitude_px >= 0.0) || !std::isfinite(amplitude_px)) {
    throw DomainError("inject_noise: amplitude must be finite and non-negative");
  }
  GazeStream out(stream.begin(), stream.end());
  if (amplitude_px == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-amplitude_px, amplitude_px);
  for (auto& s : out) {
    s.x += noise(rng);
    s.y += noise(rng);
  }
  return out;
}

}  // namespace trajkit

#endif  // TRAJKIT_GAZE_HPP
