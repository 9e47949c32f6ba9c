#ifndef TRAJKIT_TRAJECTORY_HPP
#define TRAJKIT_TRAJECTORY_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trajkit/error.hpp"
#include "trajkit/geodesy.hpp"

namespace trajkit {

using Millis = std::int64_t;

/// Timestamped planar track. Timestamps are strictly increasing integer
/// milliseconds; one point per timestamp; never empty.
class Trajectory {
public:
  Trajectory(std::vector<Millis> timestamps, std::vector<PlanePoint> points)
      : timestamps_(std::move(timestamps)), points_(std::move(points)) {
    if (timestamps_.size() != points_.size()) {
      throw SizeError("Trajectory: " + std::to_string(timestamps_.size()) + " timestamps but " +
                      std::to_string(points_.size()) + " points");
    }
    if (timestamps_.empty()) {
      throw SizeError("Trajectory: empty");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!is_finite(points_[i])) {
        throw DomainError("Trajectory: non-finite point at index " + std::to_string(i));
      }
      if (i > 0 && timestamps_[i] <= timestamps_[i - 1]) {
        throw DomainError("Trajectory: timestamps not strictly increasing at index " +
                          std::to_string(i));
      }
    }
  }

  std::size_t size() const noexcept { return points_.size(); }
  std::span<const Millis> timestamps() const noexcept { return timestamps_; }
  std::span<const PlanePoint> points() const noexcept { return points_; }
  Millis start_time() const noexcept { return timestamps_.front(); }
  Millis end_time() const noexcept { return timestamps_.back(); }
  const PlanePoint& front() const noexcept { return points_.front(); }
  const PlanePoint& back() const noexcept { return points_.back(); }

  /// Copy of samples [first, first + count).
  Trajectory slice(std::size_t first, std::size_t count) const {
    if (count == 0 || first + count > size()) {
      throw RangeError("Trajectory::slice out of range");
    }
    return Trajectory(std::vector<Millis>(timestamps_.begin() + first,
                                          timestamps_.begin() + first + count),
                      std::vector<PlanePoint>(points_.begin() + first,
                                              points_.begin() + first + count));
  }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

private:
  std::vector<Millis> timestamps_;
  std::vector<PlanePoint> points_;
};

/// Offset of the k-th sample of a uniform grid at `fps`, rounded to the
/// nearest millisecond. Exact for rates dividing 1000.
inline Millis grid_offset(std::size_t k, double fps) {
  return static_cast<Millis>(std::llround(static_cast<double>(k) * 1000.0 / fps));
}

/// True when every timestamp sits on the grid start + grid_offset(k, fps).
inline bool is_uniform(const Trajectory& traj, double fps) {
  const auto ts = traj.timestamps();
  for (std::size_t k = 0; k < ts.size(); ++k) {
    if (ts[k] != ts[0] + grid_offset(k, fps)) return false;
  }
  return true;
}

/// Linear-in-time resampling onto the uniform grid starting at the first
/// timestamp. The grid never extends past the last input timestamp.
inline Trajectory resample(const Trajectory& traj, double fps) {
  if (traj.size() < 2) {
    throw SizeError("resample: need at least 2 samples");
  }
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    throw DomainError("resample: fps must be positive");
  }
  const auto ts = traj.timestamps();
  const auto ps = traj.points();
  std::vector<Millis> out_t;
  std::vector<PlanePoint> out_p;
  std::size_t seg = 0;
  for (std::size_t k = 0;; ++k) {
    const Millis t = ts.front() + grid_offset(k, fps);
    if (t > ts.back()) break;
    while (seg + 1 < ts.size() && ts[seg + 1] <= t) ++seg;
    PlanePoint p;
    if (ts[seg] == t) {
      p = ps[seg];
    } else {
      const double u = static_cast<double>(t - ts[seg]) / static_cast<double>(ts[seg + 1] - ts[seg]);
      p = {ps[seg].x + u * (ps[seg + 1].x - ps[seg].x), ps[seg].y + u * (ps[seg + 1].y - ps[seg].y)};
    }
    out_t.push_back(t);
    out_p.push_back(p);
  }
  return Trajectory(std::move(out_t), std::move(out_p));
}

struct SamplerConfig {
  double input_secs = 8.0;
  double target_secs = 6.0;
  double stride_secs = 2.0;
  double fps = 5.0;

  std::size_t input_steps() const { return steps(input_secs, "input_secs"); }
  std::size_t target_steps() const { return steps(target_secs, "target_secs"); }
  std::size_t stride_steps() const { return steps(stride_secs, "stride_secs"); }

  void validate() const {
    if (!(fps > 0.0) || !std::isfinite(fps)) throw ConfigError("SamplerConfig: fps must be positive");
    input_steps();
    target_steps();
    stride_steps();
  }

private:
  std::size_t steps(double secs, const char* name) const {
    const double raw = secs * fps;
    const double r = std::round(raw);
    if (!(secs > 0.0) || std::abs(raw - r) > 1e-9 || r < 1.0) {
      throw ConfigError(std::string("SamplerConfig: ") + name +
                        " must be positive with an integral number of samples at fps");
    }
    return static_cast<std::size_t>(r);
  }
};

/// Input/target pair cut from a uniform trajectory. The target starts one
/// sample step after `anchor_time`, the timestamp of the last input sample.
struct WindowPair {
  Trajectory input;
  Trajectory target;
  Millis anchor_time = 0;
  std::size_t first_index = 0;  // index of input.front() in the source
};

/// Windows at offsets 0, stride, 2*stride, ... Each window uses
/// input_steps + target_steps consecutive samples, so a track of n samples
/// (duration n / fps) yields floor((n - in - tg) / stride) + 1 windows.
/// Trailing partial windows are dropped.
inline std::vector<WindowPair> sliding_windows(const Trajectory& traj, const SamplerConfig& cfg) {
  cfg.validate();
  if (!is_uniform(traj, cfg.fps)) {
    throw DomainError("sliding_windows: trajectory is not uniform at the configured fps");
  }
  const std::size_t n_in = cfg.input_steps();
  const std::size_t n_tg = cfg.target_steps();
  const std::size_t stride = cfg.stride_steps();
  std::vector<WindowPair> out;
  for (std::size_t s = 0; s + n_in + n_tg <= traj.size(); s += stride) {
    out.push_back(WindowPair{traj.slice(s, n_in), traj.slice(s + n_in, n_tg),
                             traj.timestamps()[s + n_in - 1], s});
  }
  return out;
}

/// Instantaneous speed per segment, meters/second; n - 1 values.
inline std::vector<double> speed_profile(const Trajectory& traj) {
  if (traj.size() < 2) {
    throw SizeError("speed_profile: need at least 2 samples");
  }
  const auto ts = traj.timestamps();
  const auto ps = traj.points();
  std::vector<double> v(traj.size() - 1);
  for (std::size_t i = 1; i < traj.size(); ++i) {
    v[i - 1] = distance(ps[i], ps[i - 1]) / (static_cast<double>(ts[i] - ts[i - 1]) / 1000.0);
  }
  return v;
}

}  // namespace trajkit

#endif  // TRAJKIT_TRAJECTORY_HPP
