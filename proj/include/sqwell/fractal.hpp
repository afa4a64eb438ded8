#pragma once

// Divider-length measurement of F and the quadratic phase sums whose spread
// sets the length exponent. With l(eps) ~ eps^{1-D}, a slope of -1/4 in
// log l vs log eps means D = 5/4.

#include "sqwell/error.hpp"
#include "sqwell/fitting.hpp"
#include "sqwell/parallel.hpp"
#include "sqwell/universal.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqwell {

struct CurveLength
{
  double epsilon = 0.0;
  double printed = 0.0;    ///< sum_m sqrt(eps^2 + dF_m^2) / 4
  double simplified = 0.0; ///< (1/2) sum_m |dF_m|
};

namespace detail {

/// Number of ruler steps M = floor(1/eps), tolerant of 1/eps landing a hair
/// below an integer.
inline std::size_t ruler_steps(double epsilon)
{
  return static_cast<std::size_t>(std::floor(1.0 / epsilon + 1e-9));
}

} // namespace detail

/// Curve length at ruler eps with dF_m = F((m+1) eps) - F((m-1) eps), m = 1..M.
/// The curve must start at 0 with uniform spacing eps and reach index M+1.
inline CurveLength curve_length(const UniversalCurve& curve, double epsilon)
{
  if (!(epsilon > 0.0) || epsilon > 0.5)
    throw std::invalid_argument("curve_length: epsilon must be in (0, 1/2]");
  const auto& xs = curve.xi_grid;
  const std::size_t steps = detail::ruler_steps(epsilon);
  if (xs.size() != curve.values.size())
    throw GridMismatch("curve_length: grid and values differ in size");
  if (xs.size() < steps + 2)
    throw GridMismatch("curve_length: need " + std::to_string(steps + 2) + " samples for eps = " +
                       std::to_string(epsilon) + ", curve has " + std::to_string(xs.size()));
  if (std::abs(xs.front()) > 1e-12)
    throw GridMismatch("curve_length: curve must start at xi = 0");
  for (std::size_t i = 1; i < steps + 2; ++i) {
    const double h = xs[i] - xs[i - 1];
    if (std::abs(h - epsilon) > 1e-6 * epsilon)
      throw GridMismatch("curve_length: spacing " + std::to_string(h) + " does not match eps = " +
                         std::to_string(epsilon));
  }

  CurveLength out;
  out.epsilon = epsilon;
  const auto& f = curve.values;
  for (std::size_t m = 1; m <= steps; ++m) {
    const double d = f[m + 1] - f[m - 1];
    out.printed += std::sqrt(epsilon * epsilon + d * d);
    out.simplified += std::abs(d);
  }
  out.printed /= 4.0;
  out.simplified /= 2.0;
  return out;
}

/// Rulers 1/M between eps_min and eps_max, M = round of a log-spaced ladder,
/// descending in eps, duplicates removed. Reciprocal-integer rulers let the
/// periodic DFT route produce F exactly on the ruler grid.
inline std::vector<double> ruler_ladder(double eps_min, double eps_max, std::size_t count)
{
  if (!(eps_min > 0.0) || !(eps_max > eps_min) || eps_max > 0.5)
    throw std::invalid_argument("ruler_ladder: need 0 < eps_min < eps_max <= 1/2");
  const auto grid = log_grid(1.0 / eps_max, 1.0 / eps_min, count);
  std::vector<double> out;
  std::size_t last = 0;
  for (double cells : grid) {
    const auto m = static_cast<std::size_t>(std::llround(cells));
    if (m != last)
      out.push_back(1.0 / static_cast<double>(m));
    last = m;
  }
  return out;
}

/// l(eps) of the truncated F for each reciprocal-integer ruler, via the periodic grid.
inline std::vector<CurveLength> measure_universal_lengths(std::span<const double> epsilons, std::size_t modes)
{
  std::vector<CurveLength> out(epsilons.size());
  parallel_for(epsilons.size(), [&](std::size_t i) {
    const double eps = epsilons[i];
    const auto cells = static_cast<std::size_t>(std::llround(1.0 / eps));
    if (std::abs(static_cast<double>(cells) * eps - 1.0) > 1e-9)
      throw std::invalid_argument("measure_universal_lengths: 1/eps must be an integer, eps = " + std::to_string(eps));
    const auto curve = universal_curve_periodic(cells, modes);
    out[i] = curve_length(curve, 1.0 / static_cast<double>(cells));
  });
  return out;
}

struct DimensionFit
{
  std::vector<double> epsilons; ///< strictly decreasing
  std::vector<double> lengths;
  double slope = 0.0;
  double dimension = 0.0; ///< 1 - slope
  double residual = 0.0;  ///< RMS of the log-space fit
};

/// Least-squares slope of log l against log eps. Needs >= 5 distinct rulers
/// spanning at least two decades.
inline DimensionFit dimension_fit(std::span<const double> epsilons, std::span<const double> lengths)
{
  if (epsilons.size() != lengths.size())
    throw std::invalid_argument("dimension_fit: epsilons and lengths differ in size");
  if (epsilons.size() < 5)
    throw IllConditionedFit("dimension_fit: need at least 5 rulers, got " + std::to_string(epsilons.size()));

  std::vector<std::size_t> order(epsilons.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return epsilons[a] > epsilons[b]; });

  DimensionFit fit;
  for (std::size_t i : order) {
    fit.epsilons.push_back(epsilons[i]);
    fit.lengths.push_back(lengths[i]);
  }
  for (std::size_t i = 1; i < fit.epsilons.size(); ++i)
    if (!(fit.epsilons[i] < fit.epsilons[i - 1]))
      throw IllConditionedFit("dimension_fit: rulers must be distinct");
  if (!(fit.epsilons.back() > 0.0))
    throw IllConditionedFit("dimension_fit: rulers must be positive");
  if (std::log10(fit.epsilons.front() / fit.epsilons.back()) < 2.0 - 1e-9)
    throw IllConditionedFit("dimension_fit: rulers must span at least two decades");

  const auto line = log_log_fit(fit.epsilons, fit.lengths);
  fit.slope = line.slope;
  fit.dimension = 1.0 - line.slope;
  fit.residual = line.rms_residual;
  return fit;
}

struct PhaseSumSample
{
  double epsilon = 0.0;
  std::size_t terms = 0; ///< summed modes n = 2..K, so terms = K - 1
  std::vector<double> values;
  double mean = 0.0;
  double stddev = 0.0; ///< population (1/M) normalisation
};

/// xi_m = sum_{n=2}^{K} sin(2 pi n^2 m eps), K = floor(sqrt(1/(2 eps))),
/// for m = 1..floor(1/eps). When 1/eps is an integer M the phases are reduced
/// exactly as (n^2 m mod M)/M and read from a sine table.
inline PhaseSumSample phase_sum_samples(double epsilon)
{
  if (!(epsilon > 0.0))
    throw std::invalid_argument("phase_sum_samples: epsilon must be > 0");
  const auto cutoff = static_cast<std::size_t>(std::floor(std::sqrt(1.0 / (2.0 * epsilon))));
  if (cutoff < 2)
    throw std::invalid_argument("phase_sum_samples: epsilon too large, cutoff below n = 2");
  const std::size_t count = detail::ruler_steps(epsilon);

  PhaseSumSample sample;
  sample.epsilon = epsilon;
  sample.terms = cutoff - 1;
  sample.values.assign(count, 0.0);

  const double inverse = 1.0 / epsilon;
  const auto cells = static_cast<std::uint64_t>(std::llround(inverse));
  const bool integral = std::abs(static_cast<double>(cells) - inverse) < 1e-9 * inverse;
  if (integral) {
    std::vector<double> table(cells);
    for (std::uint64_t r = 0; r < cells; ++r)
      table[r] = std::sin(2.0 * pi * static_cast<double>(r) / static_cast<double>(cells));
    std::vector<std::uint64_t> residues(cutoff + 1);
    for (std::uint64_t n = 2; n <= cutoff; ++n)
      residues[n] = (n * n) % cells;
    parallel_for(count, [&](std::size_t i) {
      const std::uint64_t m = i + 1;
      double sum = 0.0;
      for (std::uint64_t n = 2; n <= cutoff; ++n)
        sum += table[(residues[n] * m) % cells];
      sample.values[i] = sum;
    });
  } else {
    parallel_for(count, [&](std::size_t i) {
      const double m = static_cast<double>(i + 1);
      double sum = 0.0;
      for (std::size_t n = 2; n <= cutoff; ++n) {
        const double nn = static_cast<double>(n);
        sum += std::sin(2.0 * pi * detail::frac(nn * nn * m * epsilon));
      }
      sample.values[i] = sum;
    });
  }

  double mean = 0.0;
  for (double v : sample.values)
    mean += v;
  mean /= static_cast<double>(count);
  double var = 0.0;
  for (double v : sample.values)
    var += (v - mean) * (v - mean);
  sample.mean = mean;
  sample.stddev = std::sqrt(var / static_cast<double>(count));
  return sample;
}

struct HistogramBin
{
  double left = 0.0;
  double right = 0.0;
  std::size_t count = 0;
};

struct NormalityReport
{
  std::vector<HistogramBin> histogram;
  std::size_t samples = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::optional<double> skewness;        ///< empty when stddev == 0
  std::optional<double> excess_kurtosis; ///< empty when stddev == 0
};

/// Equal-width histogram over [min, max] plus standardised third and fourth
/// moments. No verdict is attached.
inline NormalityReport normality_diagnostics(const PhaseSumSample& sample, std::size_t bins)
{
  if (sample.values.empty())
    throw std::invalid_argument("normality_diagnostics: empty sample");
  if (bins == 0)
    throw std::invalid_argument("normality_diagnostics: need at least one bin");

  const auto& v = sample.values;
  const double n = static_cast<double>(v.size());
  NormalityReport report;
  report.samples = v.size();

  double mean = 0.0;
  for (double x : v)
    mean += x;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  report.mean = mean;
  report.stddev = std::sqrt(m2);
  if (m2 > 0.0) {
    report.skewness = m3 / std::pow(m2, 1.5);
    report.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }

  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) {
    report.histogram.push_back({lo, hi, v.size()});
    return report;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  report.histogram.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    report.histogram[b].left = lo + width * static_cast<double>(b);
    report.histogram[b].right = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
  }
  for (double x : v) {
    auto b = static_cast<std::size_t>((x - lo) / width);
    report.histogram[std::min(b, bins - 1)].count += 1;
  }
  return report;
}

/// log sigma(xi_m) against log eps over the given rulers.
inline LinearFit phase_sum_scaling(std::span<const double> epsilons)
{
  std::vector<double> sigmas(epsilons.size());
  for (std::size_t i = 0; i < epsilons.size(); ++i)
    sigmas[i] = phase_sum_samples(epsilons[i]).stddev;
  return log_log_fit(epsilons, sigmas);
}

} // namespace sqwell
