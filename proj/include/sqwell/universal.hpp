#pragma once

// The small-shift limit of the scaled escape probability,
//
//   F(xi) = sum_{n>=2} n^2 / (1 - n^2)^2 [1 - cos(2 pi n^2 xi)],
//
// together with its sampling helpers and the dips at rational xi = q/p^2.

#include "sqwell/parallel.hpp"
#include "sqwell/survival.hpp"
#include "sqwell/well.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqwell {

inline constexpr std::size_t default_universal_modes = 100'000;

/// Weight of mode n in F: n^2 / (n^2 - 1)^2.
inline double universal_weight(double n) noexcept
{
  const double n2 = n * n;
  const double d = n2 - 1.0;
  return n2 / (d * d);
}

/// sup F = 2 sum_{n>=2} n^2/(n^2-1)^2 = pi^2/6 + 1/8.
inline double universal_upper_bound() { return pi * pi / 6.0 + 0.125; }

/// Bound on the neglected part 2 sum_{n>N} n^2/(n^2-1)^2 of any F value.
inline double universal_tail_bound(std::size_t modes)
{
  const double n = static_cast<double>(std::max<std::size_t>(modes, 2));
  const double shrink = 1.0 - 1.0 / (n * n);
  return std::log((n + 1.0) / (n - 1.0)) + 2.0 / (3.0 * n * n * n * shrink * shrink);
}

struct UniversalValue
{
  double value = 0.0;
  double tail_bound = 0.0;
};

/// Truncated F(xi), summed from n = N down to 2. Each term is written as
/// 2 w_n sin^2(pi frac(n^2 xi)), so F(0) is exactly 0 and F has period 1.
inline UniversalValue universal_F(double xi, std::size_t modes = default_universal_modes)
{
  if (modes < 2)
    throw std::invalid_argument("universal_F: truncation must be >= 2");
  const double reduced = xi - std::floor(xi);
  double sum = 0.0;
  for (std::size_t k = modes; k >= 2; --k) {
    const double n = static_cast<double>(k);
    const double s = std::sin(pi * detail::frac(n * n * reduced));
    sum += universal_weight(n) * s * s;
  }
  return {2.0 * sum, universal_tail_bound(modes)};
}

/// Companion of F with the ground-state phase removed:
///   G(xi) = sum_{n>=2} n^2/(1-n^2)^2 [1 - cos(2 pi (n^2 - 1) xi)].
/// Since |A| is blind to a global phase, 1 - |A(xi T)|^2 equals
/// 1 - |sum_n a_n^2 exp(-2 pi i (n^2 - 1) xi)|^2, whose small-shift limit over
/// a whole period is 8 delta^2 G(xi). G and F coincide only at integer xi.
inline UniversalValue relative_phase_F(double xi, std::size_t modes = default_universal_modes)
{
  if (modes < 2)
    throw std::invalid_argument("relative_phase_F: truncation must be >= 2");
  const double reduced = xi - std::floor(xi);
  double sum = 0.0;
  for (std::size_t k = modes; k >= 2; --k) {
    const double n = static_cast<double>(k);
    const double s = std::sin(pi * detail::frac((n * n - 1.0) * reduced));
    sum += universal_weight(n) * s * s;
  }
  return {2.0 * sum, universal_tail_bound(modes)};
}

struct UniversalCurve
{
  std::vector<double> xi_grid;
  std::vector<double> values;
  std::size_t truncation = 0;
  double tail_bound = 0.0;
};

inline UniversalCurve universal_curve(std::span<const double> xi_grid, std::size_t modes = default_universal_modes)
{
  if (!std::is_sorted(xi_grid.begin(), xi_grid.end()))
    throw std::invalid_argument("universal_curve: grid must be sorted");
  UniversalCurve curve;
  curve.xi_grid.assign(xi_grid.begin(), xi_grid.end());
  curve.values.assign(xi_grid.size(), 0.0);
  curve.truncation = modes;
  curve.tail_bound = universal_tail_bound(modes);
  parallel_for(xi_grid.size(), [&](std::size_t i) { curve.values[i] = universal_F(xi_grid[i], modes).value; });
  return curve;
}

namespace detail {

inline std::mutex& fftw_planner_mutex()
{
  static std::mutex m;
  return m;
}

struct FftwFree
{
  void operator()(void* p) const noexcept { fftw_free(p); }
};

} // namespace detail

/// F on the periodic grid xi_m = m/M, m = 0..M+1 (the last two points repeat
/// m = 0 and m = 1). With r = n^2 mod M,
///   F(m/M) = sum_n w_n - sum_r W_r cos(2 pi r m / M),   W_r = sum_{n^2 = r mod M} w_n,
/// i.e. one length-M real DFT, so the truncation can be far larger than the grid.
inline UniversalCurve universal_curve_periodic(std::size_t cells, std::size_t modes)
{
  if (cells < 2)
    throw std::invalid_argument("universal_curve_periodic: need at least 2 cells");
  if (modes < 2)
    throw std::invalid_argument("universal_curve_periodic: truncation must be >= 2");

  const std::size_t m_count = cells;
  std::unique_ptr<double, detail::FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * m_count)));
  std::unique_ptr<fftw_complex, detail::FftwFree> out(
    static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (m_count / 2 + 1))));
  if (!in || !out)
    throw std::bad_alloc();
  std::fill(in.get(), in.get() + m_count, 0.0);

  double total = 0.0;
  for (std::size_t k = modes; k >= 2; --k) {
    const double w = universal_weight(static_cast<double>(k));
    const std::uint64_t residue = (static_cast<std::uint64_t>(k) % m_count) * (static_cast<std::uint64_t>(k) % m_count) % m_count;
    in.get()[residue] += w;
    total += w;
  }

  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(m_count), in.get(), out.get(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  UniversalCurve curve;
  curve.truncation = modes;
  curve.tail_bound = universal_tail_bound(modes);
  curve.xi_grid.resize(m_count + 2);
  curve.values.resize(m_count + 2);
  for (std::size_t m = 0; m < m_count; ++m) {
    // real part of the DFT at m equals that at M - m
    const std::size_t idx = m <= m_count / 2 ? m : m_count - m;
    curve.values[m] = std::max(0.0, total - out.get()[idx][0]);
    curve.xi_grid[m] = static_cast<double>(m) / static_cast<double>(m_count);
  }
  curve.values[0] = 0.0;
  curve.values[m_count] = curve.values[0];
  curve.values[m_count + 1] = curve.values[1];
  curve.xi_grid[m_count] = 1.0;
  curve.xi_grid[m_count + 1] = static_cast<double>(m_count + 1) / static_cast<double>(m_count);
  return curve;
}

/// P_escape(xi T) / (8 delta^2) on xi_grid, for comparison with F.
inline UniversalCurve scaled_escape_limit(const WellConfig& config, std::span<const double> xi_grid, std::size_t modes)
{
  if (!(config.delta() > 0.0))
    throw std::invalid_argument("scaled_escape_limit: delta must be > 0");
  for (double xi : xi_grid)
    if (!(xi >= 0.0))
      throw std::domain_error("scaled_escape_limit: xi must be >= 0");
  const SurvivalSeries series(config, modes);
  const double scale = 8.0 * config.delta() * config.delta();
  UniversalCurve curve;
  curve.xi_grid.assign(xi_grid.begin(), xi_grid.end());
  curve.values.assign(xi_grid.size(), 0.0);
  curve.truncation = modes;
  curve.tail_bound = 2.0 * survival_tail_bound(config, modes) / scale;
  parallel_for(xi_grid.size(), [&](std::size_t i) {
    curve.values[i] = series.escape(xi_grid[i] * config.period()) / scale;
  });
  return curve;
}

/// max_i |a_i - b_i| for curves on identical grids.
inline double sup_norm_distance(const UniversalCurve& a, const UniversalCurve& b)
{
  if (a.xi_grid != b.xi_grid)
    throw GridMismatch("sup_norm_distance: curves live on different grids");
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d;
}

struct Valley
{
  long q = 0;
  long p = 2;
  double location = 0.0;
  double depth = 0.0;
};

using ValleyList = std::vector<Valley>;

struct ValleyScan
{
  double probe = 1e-4; ///< neighbour offset used for the strict-minimum test
  std::size_t modes = default_universal_modes;
};

/// Rational points q/p^2 in [0, 1] for 2 <= p <= p_max that are strict local
/// minima of F against xi +- probe. Each location appears once, under its
/// smallest p. Sorted by location.
inline ValleyList valley_locations(long p_max, const ValleyScan& scan = {})
{
  if (p_max < 2)
    throw std::invalid_argument("valley_locations: p_max must be >= 2");
  if (!(scan.probe > 0.0))
    throw std::invalid_argument("valley_locations: probe must be > 0");

  struct Candidate
  {
    long q, p;
  };
  std::vector<Candidate> candidates;
  for (long p = 2; p <= p_max; ++p) {
    const long denom = p * p;
    for (long q = 0; q <= denom; ++q) {
      // q/p^2 already listed under a smaller p'?  q/p^2 = q'/p'^2  <=>  q p'^2 = q' p^2
      bool seen = false;
      for (long smaller = 2; smaller < p && !seen; ++smaller)
        seen = (q * smaller * smaller) % denom == 0;
      if (!seen)
        candidates.push_back({q, p});
    }
  }

  std::vector<char> keep(candidates.size(), 0);
  std::vector<Valley> found(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i) {
    const auto [q, p] = candidates[i];
    const double x = static_cast<double>(q) / static_cast<double>(p * p);
    const double centre = universal_F(x, scan.modes).value;
    const double left = universal_F(x - scan.probe, scan.modes).value;
    const double right = universal_F(x + scan.probe, scan.modes).value;
    found[i] = {q, p, x, centre};
    keep[i] = centre < left && centre < right;
  });

  ValleyList out;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (keep[i])
      out.push_back(found[i]);
  std::stable_sort(out.begin(), out.end(), [](const Valley& a, const Valley& b) { return a.location < b.location; });
  return out;
}

} // namespace sqwell
