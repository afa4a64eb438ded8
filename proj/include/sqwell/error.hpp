#pragma once

#include <stdexcept>
#include <string>

namespace sqwell {

/// Base of every error raised by the library. Argument-validation failures
/// use std::invalid_argument / std::domain_error directly.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Requested truncation would exceed the configured mode cap.
class TruncationCapExceeded : public Error
{
public:
  using Error::Error;
};

/// 1 - |A|^2 came out clearly negative: N is too small for the requested time,
/// or the series has been corrupted.
class TruncationInconsistency : public Error
{
public:
  using Error::Error;
};

/// Adaptive quadrature did not reach its tolerance. what() carries the
/// achieved error estimate and interval count.
class NonConvergence : public Error
{
public:
  NonConvergence(const std::string& what, double estimate, double error, std::size_t intervals)
    : Error(what + " (estimate " + std::to_string(estimate) + ", error " + std::to_string(error) +
            ", intervals " + std::to_string(intervals) + ")"),
      estimate_(estimate), error_(error), intervals_(intervals)
  {}

  double estimate() const noexcept { return estimate_; }
  double error() const noexcept { return error_; }
  std::size_t intervals() const noexcept { return intervals_; }

private:
  double estimate_;
  double error_;
  std::size_t intervals_;
};

/// Two sampled objects do not live on the same grid.
class GridMismatch : public Error
{
public:
  using Error::Error;
};

/// A least-squares fit was requested on too few points or too narrow a span.
class IllConditionedFit : public Error
{
public:
  using Error::Error;
};

} // namespace sqwell
