#pragma once

#include "sqwell/error.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sqwell {

struct LinearFit
{
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

/// Unweighted least squares y = slope * x + intercept.
inline LinearFit least_squares(std::span<const double> xs, std::span<const double> ys)
{
  if (xs.size() != ys.size())
    throw std::invalid_argument("least_squares: x and y sizes differ");
  if (xs.size() < 2)
    throw IllConditionedFit("least_squares: need at least two points");

  const double n = static_cast<double>(xs.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= n;
  mean_y /= n;

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x;
    sxx += dx * dx;
    sxy += dx * (ys[i] - mean_y);
  }
  if (!(sxx > 0.0))
    throw IllConditionedFit("least_squares: abscissae are all equal");

  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

/// Fit of log(y) against log(x); all values must be strictly positive.
inline LinearFit log_log_fit(std::span<const double> xs, std::span<const double> ys)
{
  if (xs.size() != ys.size())
    throw std::invalid_argument("log_log_fit: x and y sizes differ");
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw IllConditionedFit("log_log_fit: non-positive value at index " + std::to_string(i));
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  return least_squares(lx, ly);
}

/// Log-spaced grid lo * (hi/lo)^(i/(count-1)), endpoints exact.
inline std::vector<double> log_grid(double lo, double hi, std::size_t count)
{
  if (!(lo > 0.0) || !(hi > lo) || count < 2)
    throw std::invalid_argument("log_grid: need 0 < lo < hi and count >= 2");
  std::vector<double> out(count);
  const double ratio = std::log(hi / lo);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

/// Uniform grid lo + (hi-lo) * i/(count-1), endpoints exact.
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t count)
{
  if (count < 2 || !(hi > lo))
    throw std::invalid_argument("uniform_grid: need lo < hi and count >= 2");
  std::vector<double> out(count);
  const double span = hi - lo;
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo + span * static_cast<double>(i) / static_cast<double>(count - 1);
  out.back() = hi;
  return out;
}

} // namespace sqwell
