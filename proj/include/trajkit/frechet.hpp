#ifndef TRAJKIT_FRECHET_HPP
#define TRAJKIT_FRECHET_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "trajkit/error.hpp"
#include "trajkit/geodesy.hpp"

namespace trajkit {

/// Discrete Fréchet distance (Eiter & Mannila): the minimum over monotone
/// couplings of the two sequences of the largest coupled-pair distance.
///
/// O(|p|·|q|) time, O(|q|) scratch. The recurrence runs on squared distances,
/// which order identically, and takes a single square root at the end.
inline double discrete_frechet(std::span<const PlanePoint> p, std::span<const PlanePoint> q) {
  if (p.empty() || q.empty()) {
    throw SizeError("discrete_frechet: both sequences must be non-empty");
  }
  const std::size_t m = q.size();
  std::vector<double> row(m);

  // First row: coupling p[0] against a growing prefix of q.
  row[0] = squared_distance(p[0], q[0]);
  for (std::size_t j = 1; j < m; ++j) {
    row[j] = std::max(row[j - 1], squared_distance(p[0], q[j]));
  }

  for (std::size_t i = 1; i < p.size(); ++i) {
    double diag = row[0];  // c(i-1, j-1) for the next column
    row[0] = std::max(row[0], squared_distance(p[i], q[0]));
    for (std::size_t j = 1; j < m; ++j) {
      const double up = row[j];  // c(i-1, j)
      const double best = std::min({diag, up, row[j - 1]});
      row[j] = std::max(best, squared_distance(p[i], q[j]));
      diag = up;
    }
  }
  return std::sqrt(row[m - 1]);
}

}  // namespace trajkit

#endif  // TRAJKIT_FRECHET_HPP
