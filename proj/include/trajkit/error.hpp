#ifndef TRAJKIT_ERROR_HPP
#define TRAJKIT_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trajkit {

/// Base class of every exception thrown by trajkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input sequence too short, or two sequences of mismatched length.
class SizeError : public Error {
public:
  using Error::Error;
};

/// Value outside the mathematical domain of an operation (latitude past the
/// Mercator band, non-finite coordinate, non-uniform sampling, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Query outside a valid span (spline query past the last marker, horizon
/// beyond the prediction length).
class RangeError : public Error {
public:
  using Error::Error;
};

/// Invalid configuration (empty centerline set, bad sampler settings).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Malformed input file. `row` is the 1-based data row (0 for the header or
/// whole-document errors), `line` the 1-based physical line.
class FormatError : public Error {
public:
  FormatError(const std::string& source, std::size_t row, std::size_t line,
              const std::string& what)
      : Error(source + ": row " + std::to_string(row) + " (line " +
              std::to_string(line) + "): " + what),
        row_(row), line_(line) {}

  explicit FormatError(const std::string& what) : Error(what) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t row_ = 0;
  std::size_t line_ = 0;
};

class UnsupportedVersionError : public Error {
public:
  using Error::Error;
};

}  // namespace trajkit

#endif  // TRAJKIT_ERROR_HPP
