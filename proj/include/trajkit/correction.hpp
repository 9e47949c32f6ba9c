#ifndef TRAJKIT_CORRECTION_HPP
#define TRAJKIT_CORRECTION_HPP

// Marker-based GPS correction and distance-to-road-center noise analysis.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "trajkit/error.hpp"
#include "trajkit/geodesy.hpp"
#include "trajkit/spline.hpp"
#include "trajkit/trajectory.hpp"

namespace trajkit {

/// User-placed trusted position.
struct Marker {
  Millis timestamp = 0;
  PlanePoint position;

  friend bool operator==(const Marker&, const Marker&) = default;
};

inline void validate_markers(std::span<const Marker> markers) {
  for (std::size_t i = 0; i < markers.size(); ++i) {
    if (!is_finite(markers[i].position)) {
      throw DomainError("markers: non-finite position at index " + std::to_string(i));
    }
    if (i > 0 && markers[i].timestamp <= markers[i - 1].timestamp) {
      throw DomainError("markers: timestamps not strictly increasing at index " + std::to_string(i));
    }
  }
}

/// Nearest raw timestamp to `t`; ties go to the earlier one. `t` must lie
/// within the raw span.
inline Millis snap_timestamp(std::span<const Millis> raw, Millis t) {
  if (raw.empty()) throw SizeError("snap_timestamp: empty raw track");
  if (t < raw.front() || t > raw.back()) {
    throw RangeError("snap_timestamp: " + std::to_string(t) + " outside the raw track span");
  }
  auto it = std::lower_bound(raw.begin(), raw.end(), t);
  if (*it == t || it == raw.begin()) return *it;
  const Millis after = *it;
  const Millis before = *(it - 1);
  return (t - before) <= (after - t) ? before : after;
}

/// Snaps every marker onto the raw timestamps. Throws DomainError if two
/// markers collapse onto the same sample.
inline std::vector<Marker> snap_markers(std::span<const Millis> raw, std::span<const Marker> markers) {
  std::vector<Marker> out(markers.begin(), markers.end());
  for (auto& m : out) m.timestamp = snap_timestamp(raw, m.timestamp);
  validate_markers(out);
  return out;
}

/// Natural cubic spline through the markers, per coordinate, parameterized by
/// time, evaluated at each query timestamp.
inline Trajectory spline_correct(std::span<const Marker> markers, std::span<const Millis> queries) {
  if (markers.size() < 2) {
    throw SizeError("spline_correct: need at least 2 markers, got " + std::to_string(markers.size()));
  }
  validate_markers(markers);
  const Millis t0 = markers.front().timestamp;
  std::vector<double> knots, xs, ys;
  for (const auto& m : markers) {
    knots.push_back(static_cast<double>(m.timestamp - t0) / 1000.0);
    xs.push_back(m.position.x);
    ys.push_back(m.position.y);
  }
  const NaturalCubicSpline sx(knots, xs);
  const NaturalCubicSpline sy(std::move(knots), std::move(ys));

  std::vector<PlanePoint> pts;
  pts.reserve(queries.size());
  for (const Millis q : queries) {
    if (q < markers.front().timestamp || q > markers.back().timestamp) {
      throw RangeError("spline_correct: query " + std::to_string(q) + " outside the marker span");
    }
    const double u = static_cast<double>(q - t0) / 1000.0;
    pts.push_back({sx(u), sy(u)});
  }
  return Trajectory(std::vector<Millis>(queries.begin(), queries.end()), std::move(pts));
}

/// Corrected track on the raw timestamps that fall inside the marker span.
inline Trajectory correct_track(std::span<const Millis> raw_timestamps, std::span<const Marker> markers) {
  if (markers.size() < 2) {
    throw SizeError("correct_track: need at least 2 markers");
  }
  std::vector<Millis> queries;
  for (const Millis t : raw_timestamps) {
    if (t >= markers.front().timestamp && t <= markers.back().timestamp) queries.push_back(t);
  }
  return spline_correct(markers, queries);
}

/// Road center polyline.
class Centerline {
public:
  explicit Centerline(std::vector<PlanePoint> polyline) : pts_(std::move(polyline)) {
    if (pts_.size() < 2) throw SizeError("Centerline: need at least 2 points");
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (!is_finite(pts_[i])) throw DomainError("Centerline: non-finite point");
      if (i > 0 && pts_[i] == pts_[i - 1]) {
        throw DomainError("Centerline: repeated consecutive point at index " + std::to_string(i));
      }
    }
  }

  std::span<const PlanePoint> points() const noexcept { return pts_; }

private:
  std::vector<PlanePoint> pts_;
};

inline double point_segment_distance(const PlanePoint& p, const PlanePoint& a, const PlanePoint& b) {
  const PlanePoint ab = b - a;
  const PlanePoint ap = p - a;
  const double len2 = ab.x * ab.x + ab.y * ab.y;
  double u = len2 > 0.0 ? (ap.x * ab.x + ap.y * ab.y) / len2 : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  return distance(p, {a.x + u * ab.x, a.y + u * ab.y});
}

inline double distance_to_centerlines(const PlanePoint& p, std::span<const Centerline> lines) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& line : lines) {
    const auto pts = line.points();
    for (std::size_t i = 1; i < pts.size(); ++i) {
      best = std::min(best, point_segment_distance(p, pts[i - 1], pts[i]));
    }
  }
  return best;
}

/// Per-point distance to the nearest segment of any centerline.
inline std::vector<double> distance_to_centerline(const Trajectory& traj, std::span<const Centerline> lines) {
  if (lines.empty()) throw ConfigError("distance_to_centerline: no centerlines given");
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& p : traj.points()) out.push_back(distance_to_centerlines(p, lines));
  return out;
}

struct Histogram {
  double bin_width = 1.0;
  std::vector<std::size_t> counts;  // counts[k] covers [k*w, (k+1)*w)

  std::size_t total() const {
    std::size_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
};

inline Histogram noise_histogram(std::span<const double> distances, double bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw DomainError("noise_histogram: bin_width must be positive");
  }
  Histogram h{bin_width, {}};
  for (const double d : distances) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError("noise_histogram: distances must be finite and >= 0");
    const auto k = static_cast<std::size_t>(std::floor(d / bin_width));
    if (k >= h.counts.size()) h.counts.resize(k + 1, 0);
    ++h.counts[k];
  }
  return h;
}

}  // namespace trajkit

#endif  // TRAJKIT_CORRECTION_HPP
