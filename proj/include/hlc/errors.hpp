#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hlc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An iterative estimator stopped before reaching its tolerance.
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, double best_estimate, double residual, int iterations)
      : Error(what), best_estimate_(best_estimate), residual_(residual), iterations_(iterations) {}

  double best_estimate() const { return best_estimate_; }
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double best_estimate_;
  double residual_;
  int iterations_;
};

/// A requested time interval is not covered by a recorded potential series.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// A polynomial or quadrature approximation could not reach the requested accuracy.
class ToleranceNotMet : public Error {
 public:
  ToleranceNotMet(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

/// L2 drift of an evolution exceeded the blow-up threshold.
class BlowUp : public Error {
 public:
  BlowUp(const std::string& what, double time, double drift)
      : Error(what), time_(time), drift_(drift) {}
  double time() const { return time_; }
  double drift() const { return drift_; }

 private:
  double time_;
  double drift_;
};

/// Fixed-point iteration ran out of iterations.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::vector<double> ratios)
      : Error(what), ratios_(std::move(ratios)) {}
  const std::vector<double>& ratios() const { return ratios_; }

 private:
  std::vector<double> ratios_;
};

/// Malformed snapshot or output file.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace hlc
