#pragma once

// Survival amplitude A(t) = sum_n a_n^2 exp(-i E_n t), escape probability
// 1 - |A|^2, its small-shift series and continuum integral, and the two
// short-time power laws
//
//   t << delta^2:            P ~ (8/3) pi^{3/2}/sqrt(2) t^{3/2}
//   delta^2 << t << 1:       P ~ 8 delta^2 pi^{3/2}/sqrt(2) t^{1/2}
//
// which cross at t = 3 delta^2.

#include "sqwell/error.hpp"
#include "sqwell/fitting.hpp"
#include "sqwell/parallel.hpp"
#include "sqwell/quadrature.hpp"
#include "sqwell/spectral.hpp"
#include "sqwell/well.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sqwell {

/// Escape probabilities more negative than this are reported as a
/// truncation inconsistency instead of being returned.
inline constexpr double escape_negativity_limit = 1e-8;
/// Escape probabilities within this distance outside [0, 1] are clamped.
inline constexpr double escape_clamp_window = 1e-12;

namespace detail {

/// Clamps rounding noise just outside [0, 1]; rejects clear negativity.
inline double checked_escape(double p, double t, std::size_t modes)
{
  if (p < -escape_negativity_limit)
    throw TruncationInconsistency("1 - |A|^2 = " + std::to_string(p) + " at t = " + std::to_string(t) +
                                  " with N = " + std::to_string(modes));
  if (p < 0.0 && p >= -escape_clamp_window)
    return 0.0;
  if (p > 1.0 && p <= 1.0 + escape_clamp_window)
    return 1.0;
  return p;
}

} // namespace detail

/// Precomputed weights a_n^2 and n^2 for repeated evaluation of A(t).
///
/// The amplitude is assembled as A = 1 + sum_{n<=N} a_n^2 (exp(-i E_n t) - 1),
/// using sum_n a_n^2 = 1 exactly. The truncation error is then
/// |sum_{n>N} a_n^2 (e^{-i E_n t} - 1)| <= 2 survival_tail_bound(N), it vanishes
/// at t = 0 and t = T, and 1 - |A|^2 is a sum of non-negative terms minus a
/// second-order correction, so it does not cancel catastrophically.
class SurvivalSeries
{
public:
  SurvivalSeries(const WellConfig& config, std::size_t modes)
    : config_(config), weights_(modes), squares_(modes)
  {
    if (modes == 0)
      throw std::invalid_argument("SurvivalSeries: truncation must be >= 1");
    for (std::size_t n = 1; n <= modes; ++n) {
      const double a = mode_coefficient(config, n);
      weights_[n - 1] = a * a;
      squares_[n - 1] = static_cast<double>(n) * static_cast<double>(n);
    }
  }

  const WellConfig& config() const noexcept { return config_; }
  std::size_t truncation() const noexcept { return weights_.size(); }

  /// S(t) = sum a_n^2 (exp(-i E_n t) - 1), smallest terms first.
  std::complex<double> deviation(double t) const
  {
    if (!(t >= 0.0))
      throw std::domain_error("survival amplitude: t must be >= 0");
    const double xi = t / config_.period();
    double re = 0.0, im = 0.0;
    for (std::size_t k = weights_.size(); k-- > 0;) {
      const double half = pi * detail::frac(squares_[k] * xi);
      const double s = std::sin(half);
      const double c = std::cos(half);
      // exp(-i theta) - 1 = -2 sin^2(theta/2) - i sin(theta)
      re -= 2.0 * weights_[k] * s * s;
      im -= 2.0 * weights_[k] * s * c;
    }
    return {re, im};
  }

  std::complex<double> amplitude(double t) const { return 1.0 + deviation(t); }

  /// 1 - |A(t)|^2 before any clamping.
  double raw_escape(double t) const
  {
    const auto s = deviation(t);
    return -2.0 * s.real() - std::norm(s);
  }

  double escape(double t) const { return detail::checked_escape(raw_escape(t), t, truncation()); }

private:
  WellConfig config_;
  std::vector<double> weights_;
  std::vector<double> squares_;
};

inline std::complex<double> survival_amplitude(const WellConfig& config, double t, std::size_t modes)
{
  return SurvivalSeries(config, modes).amplitude(t);
}

inline double escape_probability_exact(const WellConfig& config, double t, std::size_t modes)
{
  return SurvivalSeries(config, modes).escape(t);
}

/// Small-shift series (16/pi^2) sum_{n=2}^{N} sin^2(pi n delta) sin^2((pi n)^2 t/2) / n^4.
/// The n = 1 term is left out, matching the linearised form it is derived from.
inline double escape_small_delta(const WellConfig& config, double t, std::size_t modes)
{
  if (!(t >= 0.0))
    throw std::domain_error("escape_small_delta: t must be >= 0");
  const double delta = config.delta();
  double sum = 0.0;
  for (std::size_t k = modes; k >= 2; --k) {
    const double n = static_cast<double>(k);
    const double s1 = detail::sin_pi(n * delta);
    // (pi n)^2 t / 2 = pi * (pi n^2 t / 2)
    const double s2 = detail::sin_pi(pi * n * n * t / 2.0);
    const double n2 = n * n;
    sum += s1 * s1 * s2 * s2 / (n2 * n2);
  }
  return 16.0 / (pi * pi) * sum;
}

/// Relative accuracy target for escape_integral.
inline constexpr double escape_integral_rel_tol = 1e-6;

/// Continuum form 16 pi t^{3/2} int_0^inf sin^2(y delta/sqrt t) sin^2(y^2/2) / y^4 dy.
inline double escape_integral(double delta, double t, double rel_tol = escape_integral_rel_tol)
{
  if (!(t > 0.0))
    throw std::domain_error("escape_integral: t must be > 0");
  if (!(delta >= 0.0))
    throw std::invalid_argument("escape_integral: delta must be >= 0");
  if (delta == 0.0)
    return 0.0;
  const auto spec = IntegrandSpec::escape(delta, t);
  const double a = spec.frequency;
  // lower estimate of the integral from its two limits, to turn rel_tol into an absolute target
  const double estimate = 0.5 * std::min(0.5 * free_constant_closed_form(), a * a * confined_constant_closed_form());
  const auto r = adaptive_quadrature(spec, Domain{}, rel_tol * estimate);
  return 16.0 * pi * t * std::sqrt(t) * r.value;
}

inline double free_escape_coefficient() { return 8.0 / 3.0 * std::pow(pi, 1.5) / std::sqrt(2.0); }
inline double confined_escape_coefficient() { return 8.0 * std::pow(pi, 1.5) / std::sqrt(2.0); }

/// t << delta^2 law.
inline double asymptote_free(double t)
{
  if (!(t >= 0.0))
    throw std::domain_error("asymptote_free: t must be >= 0");
  return free_escape_coefficient() * t * std::sqrt(t);
}

/// delta^2 << t << 1 law.
inline double asymptote_confined(double delta, double t)
{
  if (!(t >= 0.0))
    throw std::domain_error("asymptote_confined: t must be >= 0");
  return confined_escape_coefficient() * delta * delta * std::sqrt(t);
}

inline double transition_time(double delta) { return 3.0 * delta * delta; }

enum class Method
{
  exact,
  small_delta,
  integral,
  asymptote_free,
  asymptote_confined,
};

inline std::string_view to_string(Method method)
{
  switch (method) {
  case Method::exact:
    return "exact";
  case Method::small_delta:
    return "small_delta";
  case Method::integral:
    return "integral";
  case Method::asymptote_free:
    return "asymptote_free";
  case Method::asymptote_confined:
    return "asymptote_confined";
  }
  return "unknown";
}

struct TimeSeries
{
  std::vector<double> times;
  std::vector<double> values;
  Method method = Method::exact;
  std::size_t truncation = 0;
  double delta = 0.0;
};

/// Escape probability by the chosen method on a strictly increasing time grid.
inline TimeSeries escape_series(const WellConfig& config, std::span<const double> times, Method method,
                                std::size_t modes)
{
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("escape_series: times must be strictly increasing");

  TimeSeries out;
  out.times.assign(times.begin(), times.end());
  out.values.assign(times.size(), 0.0);
  out.method = method;
  out.truncation = modes;
  out.delta = config.delta();

  switch (method) {
  case Method::exact: {
    const SurvivalSeries series(config, modes);
    parallel_for(times.size(), [&](std::size_t i) { out.values[i] = series.escape(times[i]); });
    break;
  }
  case Method::small_delta:
    parallel_for(times.size(), [&](std::size_t i) { out.values[i] = escape_small_delta(config, times[i], modes); });
    break;
  case Method::integral:
    parallel_for(times.size(), [&](std::size_t i) {
      out.values[i] = times[i] == 0.0 ? 0.0 : escape_integral(config.delta(), times[i]);
    });
    break;
  case Method::asymptote_free:
    for (std::size_t i = 0; i < times.size(); ++i)
      out.values[i] = asymptote_free(times[i]);
    break;
  case Method::asymptote_confined:
    for (std::size_t i = 0; i < times.size(); ++i)
      out.values[i] = asymptote_confined(config.delta(), times[i]);
    break;
  }
  return out;
}

struct FitWindow
{
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 20;
};

struct PowerLawFit
{
  double slope = 0.0;     ///< free log-log slope
  double prefactor = 0.0; ///< geometric-mean amplitude P / t^p for the reference exponent p
  double rms_residual = 0.0;
};

struct RegimeReport
{
  double transition_time = 0.0;
  double fitted_slope_early = 0.0;
  double fitted_slope_late = 0.0;
  double prefactor_early = 0.0;
  double prefactor_late = 0.0;
  double residual_early = 0.0;
  double residual_late = 0.0;
};

/// Slope by unweighted least squares on (log t, log P); the amplitude is the
/// geometric mean of P / t^reference_exponent, i.e. the intercept of a fit
/// with the exponent held at its theoretical value.
inline PowerLawFit fit_power_law(const SurvivalSeries& series, const FitWindow& window, double reference_exponent)
{
  if (window.points < 5)
    throw IllConditionedFit("power-law window needs at least 5 points, got " + std::to_string(window.points));
  const auto times = log_grid(window.lo, window.hi, window.points);
  std::vector<double> values(times.size());
  parallel_for(times.size(), [&](std::size_t i) { values[i] = series.escape(times[i]); });
  const auto fit = log_log_fit(times, values);

  double log_amp = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i)
    log_amp += std::log(values[i]) - reference_exponent * std::log(times[i]);
  log_amp /= static_cast<double>(times.size());
  return {fit.slope, std::exp(log_amp), fit.rms_residual};
}

inline RegimeReport regime_report(const WellConfig& config, const FitWindow& early, const FitWindow& late,
                                  std::size_t modes)
{
  const SurvivalSeries series(config, modes);
  const auto e = fit_power_law(series, early, 1.5);
  const auto l = fit_power_law(series, late, 0.5);
  RegimeReport report;
  report.transition_time = transition_time(config.delta());
  report.fitted_slope_early = e.slope;
  report.fitted_slope_late = l.slope;
  report.prefactor_early = e.prefactor;
  report.prefactor_late = l.prefactor;
  report.residual_early = e.rms_residual;
  report.residual_late = l.rms_residual;
  return report;
}

/// Central log-log derivative d log P / d log t of the exact escape curve on a
/// log grid; entry i belongs to times[i] for 0 < i < count-1.
inline std::vector<double> local_log_slopes(const SurvivalSeries& series, std::span<const double> times)
{
  std::vector<double> values(times.size());
  parallel_for(times.size(), [&](std::size_t i) { values[i] = series.escape(times[i]); });
  std::vector<double> slopes(times.size(), 0.0);
  for (std::size_t i = 1; i + 1 < times.size(); ++i)
    slopes[i] = (std::log(values[i + 1]) - std::log(values[i - 1])) / (std::log(times[i + 1]) - std::log(times[i - 1]));
  return slopes;
}

} // namespace sqwell
