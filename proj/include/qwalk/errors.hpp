#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

/// Edge or index lookup failed.
class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document. Carries the 1-based line number when known
/// (0 for structured documents).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A numerical check (unitarity, reconstruction, norm) exceeded its tolerance.
class ToleranceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Chebyshev propagation detected a spectrum outside the supplied bounds.
class SpectralBoundsError : public ToleranceError {
 public:
  using ToleranceError::ToleranceError;
};

/// A conveyor primitive was invoked in a state that violates its protocol
/// preconditions (occupied register on extract, amplitude pushed off-grid, ...).
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Calibration could not reach the requested transfer probability.
class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, double max_achieved)
      : std::runtime_error(what), max_achieved_(max_achieved) {}
  double max_achieved() const noexcept { return max_achieved_; }

 private:
  double max_achieved_;
};

}  // namespace qwalk
