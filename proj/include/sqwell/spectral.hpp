#pragma once

// Mode expansion of the quenched state: after the wall jumps to L = 1 + delta,
// the old ground state sqrt(2) sin(pi x) on [0, 1] is expanded in the new
// eigenbasis sqrt(2/L) sin(n pi x / L) and each mode picks up exp(-i E_n t).

#include "sqwell/error.hpp"
#include "sqwell/parallel.hpp"
#include "sqwell/well.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqwell {

/// Half-width of the window around n/L = 1 inside which the coefficient
/// formula is replaced by its local expansion.
inline constexpr double singularity_window = 1e-6;

/// Largest mode count truncation_for_tolerance will hand out.
inline constexpr std::size_t default_mode_cap = 1'000'000;

/// Overlap a_n of the initial state with the n-th expanded-well eigenmode:
///   a_n = 2/(pi sqrt L) * sin(pi n/L) / (1 - (n/L)^2).
/// Near n/L = 1 the 0/0 form is replaced by 1/sqrt(L) * (1 - h/2 + (1/4 - pi^2/6) h^2),
/// h = n/L - 1.
inline double mode_coefficient(const WellConfig& config, std::size_t n)
{
  if (n == 0)
    throw std::invalid_argument("mode_coefficient: mode index starts at 1");
  const double width = config.width();
  const double u = static_cast<double>(n) / width;
  const double h = u - 1.0;
  if (std::abs(h) < singularity_window)
    return (1.0 - 0.5 * h + (0.25 - pi * pi / 6.0) * h * h) / std::sqrt(width);
  return 2.0 / (pi * std::sqrt(width)) * detail::sin_pi(u) / (1.0 - u * u);
}

/// a_n for n = 1..N, tied to the configuration they were computed for.
class ModeCoefficients
{
public:
  static ModeCoefficients compute(const WellConfig& config, std::size_t count)
  {
    if (count == 0)
      throw std::invalid_argument("ModeCoefficients: truncation must be >= 1");
    std::vector<double> values(count);
    for (std::size_t n = 1; n <= count; ++n)
      values[n - 1] = mode_coefficient(config, n);
    return ModeCoefficients(config, std::move(values));
  }

  const WellConfig& config() const noexcept { return config_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t truncation() const noexcept { return values_.size(); }

  /// a_n, 1-based like the physics.
  double operator()(std::size_t n) const { return values_.at(n - 1); }

  /// 1 - sum a_n^2, summed from the small end.
  double completeness_defect() const noexcept
  {
    double sum = 0.0;
    for (auto it = values_.rbegin(); it != values_.rend(); ++it)
      sum += (*it) * (*it);
    return 1.0 - sum;
  }

private:
  ModeCoefficients(const WellConfig& config, std::vector<double> values)
    : config_(config), values_(std::move(values))
  {}

  WellConfig config_;
  std::vector<double> values_;
};

namespace detail {

inline void check_coefficients(const WellConfig& config, const ModeCoefficients& coeffs)
{
  if (!(coeffs.config() == config))
    throw std::invalid_argument("coefficients were computed for delta = " +
                                std::to_string(coeffs.config().delta()) + ", not " +
                                std::to_string(config.delta()));
}

/// E_n t = 2 pi n^2 (t/T); the reduced phase 2 pi frac(n^2 t/T) is exact at
/// every integer multiple of the period.
inline double mode_phase(double n_squared, double xi) noexcept
{
  return 2.0 * pi * frac(n_squared * xi);
}

} // namespace detail

/// psi(x, t) from the truncated mode series.
inline std::complex<double> wavefunction(const WellConfig& config, const ModeCoefficients& coeffs,
                                         double x, double t)
{
  detail::check_coefficients(config, coeffs);
  const double width = config.width();
  if (!(x >= 0.0 && x <= width))
    throw std::domain_error("wavefunction: x = " + std::to_string(x) + " outside [0, " +
                            std::to_string(width) + "]");
  if (!(t >= 0.0))
    throw std::domain_error("wavefunction: t must be >= 0");

  const double xi = t / config.period();
  const double scaled_x = x / width;
  const auto a = coeffs.values();
  std::complex<double> sum{0.0, 0.0};
  for (std::size_t k = a.size(); k-- > 0;) {
    const double n = static_cast<double>(k + 1);
    const double phase = detail::mode_phase(n * n, xi);
    sum += a[k] * detail::sin_pi(n * scaled_x) * std::complex<double>(std::cos(phase), -std::sin(phase));
  }
  return std::sqrt(2.0 / width) * sum;
}

/// |psi(x, t)|^2 sampled on a tensor grid. values is row-major: one row per time.
struct DensityField
{
  std::vector<double> x_grid;
  std::vector<double> t_grid;
  std::vector<double> values;

  double at(std::size_t t_index, std::size_t x_index) const
  {
    return values.at(t_index * x_grid.size() + x_index);
  }

  std::span<const double> row(std::size_t t_index) const
  {
    return std::span<const double>(values).subspan(t_index * x_grid.size(), x_grid.size());
  }

  /// Trapezoidal integral of row t_index over the x grid.
  double row_integral(std::size_t t_index) const
  {
    const auto r = row(t_index);
    double sum = 0.0;
    for (std::size_t j = 1; j < x_grid.size(); ++j)
      sum += 0.5 * (r[j] + r[j - 1]) * (x_grid[j] - x_grid[j - 1]);
    return sum;
  }
};

inline DensityField density_field(const WellConfig& config, const ModeCoefficients& coeffs,
                                  std::span<const double> x_grid, std::span<const double> t_grid)
{
  detail::check_coefficients(config, coeffs);
  const double width = config.width();
  if (x_grid.empty() || t_grid.empty())
    throw std::invalid_argument("density_field: empty grid");
  if (!std::is_sorted(x_grid.begin(), x_grid.end()) || !std::is_sorted(t_grid.begin(), t_grid.end()))
    throw std::invalid_argument("density_field: grids must be sorted");
  if (x_grid.front() < 0.0 || x_grid.back() > width)
    throw std::domain_error("density_field: x grid leaves [0, L]");
  if (t_grid.front() < 0.0)
    throw std::domain_error("density_field: negative time");

  const auto a = coeffs.values();
  const std::size_t modes = a.size();
  const std::size_t nx = x_grid.size();

  // sin(n pi x_j / L), shared by every time row
  std::vector<double> basis(modes * nx);
  for (std::size_t k = 0; k < modes; ++k) {
    const double n = static_cast<double>(k + 1);
    for (std::size_t j = 0; j < nx; ++j)
      basis[k * nx + j] = detail::sin_pi(n * (x_grid[j] / width));
  }

  DensityField field;
  field.x_grid.assign(x_grid.begin(), x_grid.end());
  field.t_grid.assign(t_grid.begin(), t_grid.end());
  field.values.assign(t_grid.size() * nx, 0.0);

  const double norm = std::sqrt(2.0 / width);
  const double period = config.period();
  parallel_for(t_grid.size(), [&](std::size_t ti) {
    const double xi = t_grid[ti] / period;
    std::vector<double> re(nx, 0.0), im(nx, 0.0);
    for (std::size_t k = modes; k-- > 0;) {
      const double n = static_cast<double>(k + 1);
      const double phase = detail::mode_phase(n * n, xi);
      const double cr = norm * a[k] * std::cos(phase);
      const double ci = -norm * a[k] * std::sin(phase);
      const double* b = &basis[k * nx];
      for (std::size_t j = 0; j < nx; ++j) {
        re[j] += cr * b[j];
        im[j] += ci * b[j];
      }
    }
    double* out = &field.values[ti * nx];
    for (std::size_t j = 0; j < nx; ++j)
      out[j] = re[j] * re[j] + im[j] * im[j];
  });
  return field;
}

/// Which series a truncation is being chosen for.
enum class Observable
{
  coefficients, ///< pointwise psi: terms fall off like n^-2
  survival,     ///< survival amplitude: terms a_n^2 fall off like n^-4
};

/// Upper bound on sum_{n>N} a_n^2 (integral comparison with
/// a_n^2 <= 4 L^3 / (pi^2 (n^2 - L^2)^2)). Infinite while N <= L.
inline double survival_tail_bound(const WellConfig& config, std::size_t count)
{
  const double width = config.width();
  const double n = static_cast<double>(count);
  if (!(n > width))
    return std::numeric_limits<double>::infinity();
  const double shrink = 1.0 - (width * width) / (n * n);
  return 4.0 * width * width * width / (pi * pi) / (3.0 * n * n * n * shrink * shrink);
}

/// Upper bound on sup_x |psi(x,t) - psi_N(x,t)|: sum_{n>N} |a_n| sqrt(2/L).
inline double coefficient_tail_bound(const WellConfig& config, std::size_t count)
{
  const double width = config.width();
  const double n = static_cast<double>(count);
  if (!(n > width))
    return std::numeric_limits<double>::infinity();
  return std::sqrt(2.0) / pi * std::log((n + width) / (n - width));
}

inline double tail_bound(const WellConfig& config, Observable observable, std::size_t count)
{
  return observable == Observable::survival ? survival_tail_bound(config, count)
                                            : coefficient_tail_bound(config, count);
}

/// Smallest N >= 2 whose analytic tail bound is below tol.
inline std::size_t truncation_for_tolerance(const WellConfig& config, Observable observable, double tol,
                                            std::size_t cap = default_mode_cap)
{
  if (!(tol > 0.0))
    throw std::invalid_argument("truncation_for_tolerance: tol must be > 0");
  std::size_t lo = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(config.width())) + 1);
  if (tail_bound(config, observable, lo) < tol)
    return lo;
  std::size_t hi = lo;
  while (!(tail_bound(config, observable, hi) < tol)) {
    if (hi >= cap)
      throw TruncationCapExceeded("tolerance " + std::to_string(tol) + " needs more than " +
                                  std::to_string(cap) + " modes");
    lo = hi;
    hi = std::min(cap, hi * 2);
  }
  // invariant: bound(lo) >= tol > bound(hi)
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (tail_bound(config, observable, mid) < tol)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

} // namespace sqwell
