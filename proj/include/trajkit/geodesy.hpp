#ifndef TRAJKIT_GEODESY_HPP
#define TRAJKIT_GEODESY_HPP

// Spherical Web Mercator (EPSG:3857) and relative-motion encoding.

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "trajkit/error.hpp"

namespace trajkit {

inline constexpr double kEarthRadius = 6378137.0;
inline constexpr double kMaxMercatorLatitude = 85.05113;
inline constexpr double kMercatorHalfExtent = std::numbers::pi * kEarthRadius;

struct GeoPoint {
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Planar position in EPSG:3857 meters.
struct PlanePoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PlanePoint&, const PlanePoint&) = default;

  PlanePoint& operator+=(const PlanePoint& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  friend PlanePoint operator+(PlanePoint a, const PlanePoint& b) { return a += b; }
  friend PlanePoint operator-(const PlanePoint& a, const PlanePoint& b) {
    return {a.x - b.x, a.y - b.y};
  }
  friend PlanePoint operator*(double s, const PlanePoint& p) { return {s * p.x, s * p.y}; }
};

/// Per-step displacement, meters/step.
struct MotionDelta {
  double dx = 0.0;
  double dy = 0.0;

  friend bool operator==(const MotionDelta&, const MotionDelta&) = default;
};

inline double distance(const PlanePoint& a, const PlanePoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double squared_distance(const PlanePoint& a, const PlanePoint& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline bool is_finite(const PlanePoint& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline PlanePoint to_mercator(const GeoPoint& p) {
  if (!std::isfinite(p.lat) || !std::isfinite(p.lon)) {
    throw DomainError("to_mercator: non-finite coordinate");
  }
  if (std::abs(p.lat) > kMaxMercatorLatitude) {
    throw DomainError("to_mercator: latitude " + std::to_string(p.lat) +
                      " outside the Web Mercator band");
  }
  if (std::abs(p.lon) > 180.0) {
    throw DomainError("to_mercator: longitude " + std::to_string(p.lon) + " outside [-180, 180]");
  }
  constexpr double deg = std::numbers::pi / 180.0;
  const double x = kEarthRadius * p.lon * deg;
  const double y = kEarthRadius * std::atanh(std::sin(p.lat * deg));  // = R ln tan(pi/4 + lat/2)
  return {x, y};
}

inline GeoPoint from_mercator(const PlanePoint& p) {
  if (!is_finite(p)) {
    throw DomainError("from_mercator: non-finite coordinate");
  }
  if (std::abs(p.x) > kMercatorHalfExtent || std::abs(p.y) > kMercatorHalfExtent) {
    throw DomainError("from_mercator: point outside Mercator bounds");
  }
  constexpr double rad = 180.0 / std::numbers::pi;
  const double lon = p.x / kEarthRadius * rad;
  const double lat = std::atan(std::sinh(p.y / kEarthRadius)) * rad;
  return {lat, lon};
}

/// delta_t = p_t - p_{t-1}; one fewer element than `points`.
inline std::vector<MotionDelta> to_deltas(std::span<const PlanePoint> points) {
  if (points.size() < 2) {
    throw SizeError("to_deltas: need at least 2 points, got " + std::to_string(points.size()));
  }
  std::vector<MotionDelta> out;
  out.reserve(points.size() - 1);
  for (std::size_t i = 1; i < points.size(); ++i) {
    out.push_back({points[i].x - points[i - 1].x, points[i].y - points[i - 1].y});
  }
  return out;
}

/// Cumulative reconstruction: element t is anchor + delta_1 + ... + delta_{t+1}.
inline std::vector<PlanePoint> from_deltas(const PlanePoint& anchor,
                                           std::span<const MotionDelta> deltas) {
  if (!is_finite(anchor)) {
    throw DomainError("from_deltas: non-finite anchor");
  }
  std::vector<PlanePoint> out;
  out.reserve(deltas.size());
  PlanePoint cur = anchor;
  for (const auto& d : deltas) {
    cur.x += d.dx;
    cur.y += d.dy;
    out.push_back(cur);
  }
  return out;
}

}  // namespace trajkit

#endif  // TRAJKIT_GEODESY_HPP
