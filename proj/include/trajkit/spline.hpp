#ifndef TRAJKIT_SPLINE_HPP
#define TRAJKIT_SPLINE_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "trajkit/error.hpp"

namespace trajkit {

/// Natural cubic spline through (knots[i], values[i]): C2, zero second
/// derivative at both ends. Two knots give the straight line.
class NaturalCubicSpline {
public:
  NaturalCubicSpline(std::vector<double> knots, std::vector<double> values)
      : t_(std::move(knots)), y_(std::move(values)), m_(t_.size(), 0.0) {
    if (t_.size() != y_.size()) throw SizeError("NaturalCubicSpline: knots/values size mismatch");
    if (t_.size() < 2) throw SizeError("NaturalCubicSpline: need at least 2 knots");
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (!std::isfinite(t_[i]) || !std::isfinite(y_[i])) {
        throw DomainError("NaturalCubicSpline: non-finite knot or value");
      }
      if (i > 0 && !(t_[i] > t_[i - 1])) {
        throw DomainError("NaturalCubicSpline: knots must be strictly increasing");
      }
    }
    solve_second_derivatives();
  }

  double front() const noexcept { return t_.front(); }
  double back() const noexcept { return t_.back(); }
  std::span<const double> second_derivatives_at_knots() const noexcept { return m_; }

  double operator()(double t) const {
    const auto [i, a, b, h] = locate(t);
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
  }

  double derivative(double t) const {
    const auto [i, a, b, h] = locate(t);
    return (y_[i + 1] - y_[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * m_[i] +
           (3.0 * b * b - 1.0) / 6.0 * h * m_[i + 1];
  }

  double second_derivative(double t) const {
    const auto [i, a, b, h] = locate(t);
    return a * m_[i] + b * m_[i + 1];
  }

private:
  struct Segment {
    std::size_t i;
    double a;  // weight of the left knot
    double b;  // weight of the right knot
    double h;
  };

  Segment locate(double t) const {
    if (!(t >= t_.front() && t <= t_.back())) {
      throw RangeError("NaturalCubicSpline: query " + std::to_string(t) + " outside [" +
                       std::to_string(t_.front()) + ", " + std::to_string(t_.back()) + "]");
    }
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
    i = std::min(i, t_.size() - 2);
    const double h = t_[i + 1] - t_[i];
    return {i, (t_[i + 1] - t) / h, (t - t_[i]) / h, h};
  }

  // Thomas algorithm on the interior rows of the tridiagonal system
  //   h[i-1] M[i-1] + 2 (h[i-1] + h[i]) M[i] + h[i] M[i+1] = 6 (s[i] - s[i-1]).
  void solve_second_derivatives() {
    const std::size_t n = t_.size();
    if (n < 3) return;
    const std::size_t k = n - 2;
    std::vector<double> c_prime(k), d_prime(k);
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t i = r + 1;
      const double h0 = t_[i] - t_[i - 1];
      const double h1 = t_[i + 1] - t_[i];
      const double diag = 2.0 * (h0 + h1);
      const double rhs = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
      if (r == 0) {
        c_prime[r] = h1 / diag;
        d_prime[r] = rhs / diag;
      } else {
        const double denom = diag - h0 * c_prime[r - 1];
        c_prime[r] = h1 / denom;
        d_prime[r] = (rhs - h0 * d_prime[r - 1]) / denom;
      }
    }
    m_[k] = d_prime[k - 1];
    for (std::size_t r = k - 1; r-- > 0;) {
      m_[r + 1] = d_prime[r] - c_prime[r] * m_[r + 2];
    }
  }

  std::vector<double> t_;
  std::vector<double> y_;
  std::vector<double> m_;
};

}  // namespace trajkit

#endif  // TRAJKIT_SPLINE_HPP
