#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sqwell {

inline constexpr double pi = std::numbers::pi;

/// Geometry of the quench: a unit-width infinite well whose right wall jumps
/// from x = 1 to x = L = 1 + delta at t = 0. Units are 2m = hbar = 1, so the
/// expanded-well levels are E_n = (pi n / L)^2 and the revival period is
/// T = 2 L^2 / pi.
class WellConfig
{
public:
  static WellConfig from_shift(double delta)
  {
    if (!std::isfinite(delta) || delta < 0.0)
      throw std::invalid_argument("wall shift must be finite and >= 0, got " + std::to_string(delta));
    return WellConfig(delta);
  }

  double delta() const noexcept { return delta_; }
  double width() const noexcept { return width_; }
  double period() const noexcept { return period_; }

  double energy(double n) const noexcept
  {
    const double k = pi * n / width_;
    return k * k;
  }

  bool operator==(const WellConfig& other) const noexcept { return delta_ == other.delta_; }

private:
  explicit WellConfig(double delta)
    : delta_(delta), width_(1.0 + delta), period_(2.0 * width_ * width_ / pi)
  {}

  double delta_;
  double width_;
  double period_;
};

namespace detail {

/// sin(pi x) with exact argument reduction, so that integer x gives exactly 0.
inline double sin_pi(double x) noexcept
{
  double r = std::fmod(x, 2.0);
  if (r > 1.0)
    r -= 2.0;
  else if (r < -1.0)
    r += 2.0;
  // r in [-1, 1]; fold onto [-1/2, 1/2]
  if (r > 0.5)
    r = 1.0 - r;
  else if (r < -0.5)
    r = -1.0 - r;
  return std::sin(pi * r);
}

/// Fractional part of a non-negative product n^2 * xi, in [0, 1).
inline double frac(double v) noexcept
{
  const double f = v - std::floor(v);
  return f >= 1.0 ? 0.0 : f;
}

} // namespace detail

} // namespace sqwell
