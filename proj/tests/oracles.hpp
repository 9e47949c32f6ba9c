#ifndef TRAJKIT_TESTS_ORACLES_HPP
#define TRAJKIT_TESTS_ORACLES_HPP

// Independent reference implementations used only by the test suites. None
// of these call into the library code paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "trajkit/gaze.hpp"
#include "trajkit/geodesy.hpp"

namespace trajkit::oracle {

inline double euclid(const PlanePoint& a, const PlanePoint& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
}

/// Enumerates every monotone coupling path from (0,0) to (n-1,m-1) with
/// steps (1,0), (0,1), (1,1) and returns min over paths of the max pair
/// distance along the path.
inline double frechet_brute_force(const std::vector<PlanePoint>& p, const std::vector<PlanePoint>& q) {
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double worst) {
    worst = std::max(worst, euclid(p[i], q[j]));
    if (worst >= best) return;
    if (i + 1 == p.size() && j + 1 == q.size()) {
      best = worst;
      return;
    }
    if (i + 1 < p.size()) walk(i + 1, j, worst);
    if (j + 1 < q.size()) walk(i, j + 1, worst);
    if (i + 1 < p.size() && j + 1 < q.size()) walk(i + 1, j + 1, worst);
  };
  walk(0, 0, 0.0);
  return best;
}

struct OracleFixation {
  std::size_t first = 0;
  std::size_t last = 0;
};

/// Maximal-window dispersion oracle. For each start, every candidate window
/// within the duration limit has its dispersion recomputed from scratch and
/// the longest valid one is taken.
inline std::vector<OracleFixation> fixations_brute_force(const std::vector<GazeSample>& s, std::int64_t min_ms,
                                                         std::int64_t max_ms, double limit_deg, double deg_per_px) {
  auto dispersion = [&](std::size_t a, std::size_t b) {
    double x0 = s[a].x, x1 = s[a].x, y0 = s[a].y, y1 = s[a].y;
    for (std::size_t k = a; k <= b; ++k) {
      x0 = std::min(x0, s[k].x);
      x1 = std::max(x1, s[k].x);
      y0 = std::min(y0, s[k].y);
      y1 = std::max(y1, s[k].y);
    }
    return ((x1 - x0) + (y1 - y0)) * deg_per_px;
  };
  std::vector<OracleFixation> out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t hi = i;
    while (hi + 1 < s.size() && s[hi + 1].timestamp - s[i].timestamp <= max_ms) ++hi;
    // Dispersion never shrinks as a window grows, so the valid ends form a
    // prefix of [i, hi]; stop at the first invalid one.
    std::size_t best = i;
    for (std::size_t j = i + 1; j <= hi; ++j) {
      if (dispersion(i, j) > limit_deg) break;
      best = j;
    }
    if (best > i && s[best].timestamp - s[i].timestamp >= min_ms) {
      out.push_back({i, best});
      i = best + 1;
    } else {
      ++i;
    }
  }
  return out;
}

/// Natural cubic spline by a dense solve of all 4(n-1) piecewise-polynomial
/// coefficients with Gaussian elimination (partial pivoting).
class DenseNaturalSpline {
public:
  DenseNaturalSpline(const std::vector<double>& t, const std::vector<double>& y) : t_(t) {
    const std::size_t segs = t.size() - 1;
    const std::size_t n = 4 * segs;
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    std::size_t row = 0;
    auto col = [](std::size_t seg, int power) { return 4 * seg + static_cast<std::size_t>(power); };
    for (std::size_t s = 0; s < segs; ++s) {
      const double h = t[s + 1] - t[s];
      a[row][col(s, 0)] = 1.0;
      a[row][n] = y[s];
      ++row;
      for (int p = 0; p < 4; ++p) a[row][col(s, p)] = std::pow(h, p);
      a[row][n] = y[s + 1];
      ++row;
    }
    for (std::size_t s = 0; s + 1 < segs; ++s) {
      const double h = t[s + 1] - t[s];
      // first derivative continuity
      a[row][col(s, 1)] = 1.0;
      a[row][col(s, 2)] = 2.0 * h;
      a[row][col(s, 3)] = 3.0 * h * h;
      a[row][col(s + 1, 1)] = -1.0;
      ++row;
      // second derivative continuity
      a[row][col(s, 2)] = 2.0;
      a[row][col(s, 3)] = 6.0 * h;
      a[row][col(s + 1, 2)] = -2.0;
      ++row;
    }
    a[row][col(0, 2)] = 2.0;
    ++row;
    const double hl = t[segs] - t[segs - 1];
    a[row][col(segs - 1, 2)] = 2.0;
    a[row][col(segs - 1, 3)] = 6.0 * hl;
    ++row;

    for (std::size_t c = 0; c < n; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < n; ++r) {
        if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
      }
      std::swap(a[c], a[piv]);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == c || a[r][c] == 0.0) continue;
        const double f = a[r][c] / a[c][c];
        for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
      }
    }
    coef_.resize(n);
    for (std::size_t c = 0; c < n; ++c) coef_[c] = a[c][n] / a[c][c];
  }

  double operator()(double x) const {
    std::size_t s = 0;
    while (s + 2 < t_.size() && x > t_[s + 1]) ++s;
    const double u = x - t_[s];
    return coef_[4 * s] + coef_[4 * s + 1] * u + coef_[4 * s + 2] * u * u + coef_[4 * s + 3] * u * u * u;
  }

  /// S'' at `x` using the polynomial of segment `seg` (one-sided limit at knots).
  double second_derivative_from_segment(std::size_t seg, double x) const {
    const double u = x - t_[seg];
    return 2.0 * coef_[4 * seg + 2] + 6.0 * coef_[4 * seg + 3] * u;
  }

private:
  std::vector<double> t_;
  std::vector<double> coef_;
};

/// Distance to a polyline by dense sampling of each segment followed by
/// ternary refinement around the best sample.
inline double polyline_distance_sampled(const PlanePoint& p, const std::vector<PlanePoint>& line) {
  double best = std::numeric_limits<double>::infinity();
  constexpr int kSamples = 1000;
  for (std::size_t s = 1; s < line.size(); ++s) {
    const auto& a = line[s - 1];
    const auto& b = line[s];
    auto at = [&](double u) { return euclid(p, {a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)}); };
    int arg = 0;
    double arg_d = at(0.0);
    for (int k = 1; k <= kSamples; ++k) {
      const double d = at(static_cast<double>(k) / kSamples);
      if (d < arg_d) arg_d = d, arg = k;
    }
    double lo = std::max(0.0, (arg - 1.0) / kSamples);
    double hi = std::min(1.0, (arg + 1.0) / kSamples);
    for (int it = 0; it < 200; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (at(m1) < at(m2)) hi = m2; else lo = m1;
    }
    best = std::min({best, arg_d, at(0.5 * (lo + hi))});
  }
  return best;
}

/// Element at index (n-1)/2 after a full sort.
inline double sorted_lower_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

/// Random 200 Hz gaze stream: alternating stable dwell periods with small
/// jitter and saccadic jumps, occasionally with noisy gaps.
inline std::vector<GazeSample> random_gaze_stream(std::mt19937_64& rng, double seconds = 10.0) {
  std::uniform_real_distribution<double> pos(0.0, 1088.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> dwell_ms(20, 1600);
  std::vector<GazeSample> out;
  const auto total = static_cast<std::int64_t>(seconds * 1000.0);
  std::int64_t t = 0;
  while (t < total) {
    const double cx = pos(rng);
    const double cy = pos(rng);
    const double jitter = unit(rng) < 0.8 ? unit(rng) * 8.0 : unit(rng) * 40.0;
    const std::int64_t end = std::min<std::int64_t>(total, t + dwell_ms(rng));
    for (; t < end; t += 5) {
      out.push_back({t, cx + (unit(rng) - 0.5) * jitter, cy + (unit(rng) - 0.5) * jitter});
    }
  }
  return out;
}

}  // namespace trajkit::oracle

#endif  // TRAJKIT_TESTS_ORACLES_HPP
