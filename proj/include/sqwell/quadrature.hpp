#pragma once

// Adaptive Gauss-Kronrod quadrature and the three oscillatory integrals
// behind the short-time escape laws:
//
//   free:      int_0^inf sin^2(y^2/2) / y^4 dy          = sqrt(pi) / (3 sqrt 2)
//   confined:  int_0^inf sin^2(y^2/2) / y^2 dy          = sqrt(pi) / (2 sqrt 2)
//   escape:    int_0^inf sin^2(a y) sin^2(y^2/2) / y^4 dy,  a = delta / sqrt(t)
//
// The finite part [lo, Y] is split at the zeros y_k = sqrt(2 pi k) of
// sin(y^2/2) (and at the zeros of sin(a y) for the escape kernel), so every
// piece is a single smooth hump. Beyond Y the factor sin^2(y^2/2) is written
// as 1/2 - cos(y^2)/2: the non-oscillatory half is integrated exactly (or by a
// second quadrature) and the cos(y^2) half is bounded by integration by parts.

#include "sqwell/error.hpp"
#include "sqwell/well.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace sqwell {

struct QuadratureResult
{
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes{
  0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
  0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
  0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
  0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights{
  0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
  0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
  0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
  0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// 7-point Gauss weights for kronrod_nodes[1], [3], [5], [7]
inline constexpr std::array<double, 4> gauss_weights{
  0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment
{
  double a;
  double b;
  double value;
  double error;

  bool operator<(const Segment& other) const noexcept { return error < other.error; }
};

template <class F>
Segment gauss_kronrod_15(const F& f, double a, double b)
{
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kronrod_weights[7];
  double gauss = fc * gauss_weights[3];
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * kronrod_nodes[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kronrod_weights[i] * pair;
    if (i % 2 == 1)
      gauss += gauss_weights[i / 2] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

} // namespace detail

/// Globally adaptive G7-K15 on [a, b]: the segment with the largest error
/// estimate is bisected until the summed estimate drops below
/// max(abs_tol, rel_tol * |value|).
template <class F>
QuadratureResult integrate_adaptive(const F& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                                    std::size_t max_intervals = 4000)
{
  if (!(b >= a))
    throw std::invalid_argument("integrate_adaptive: need a <= b");
  if (a == b)
    return {0.0, 0.0, 0};

  std::priority_queue<detail::Segment> heap;
  auto first = detail::gauss_kronrod_15(f, a, b);
  double value = first.value;
  double error = first.error;
  heap.push(first);

  auto done = [&] { return error <= std::max(abs_tol, rel_tol * std::abs(value)); };
  while (!done()) {
    if (heap.size() >= max_intervals)
      throw NonConvergence("integrate_adaptive: interval budget exhausted", value, error, heap.size());
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b))
      throw NonConvergence("integrate_adaptive: segment cannot be split further", value, error, heap.size());
    const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
    const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Resum so the returned value does not carry the running-update rounding.
  double total = 0.0, total_error = 0.0;
  const std::size_t count = heap.size();
  std::vector<detail::Segment> segments;
  segments.reserve(count);
  while (!heap.empty()) {
    segments.push_back(heap.top());
    heap.pop();
  }
  std::sort(segments.begin(), segments.end(),
            [](const detail::Segment& l, const detail::Segment& r) { return l.a < r.a; });
  for (const auto& s : segments) {
    total += s.value;
    total_error += s.error;
  }
  return {total, total_error, count};
}

enum class Integrand
{
  zero,
  free_constant,     ///< sin^2(y^2/2) / y^4
  confined_constant, ///< sin^2(y^2/2) / y^2
  escape_kernel,     ///< sin^2(a y) sin^2(y^2/2) / y^4
};

struct IntegrandSpec
{
  Integrand kind = Integrand::zero;
  double frequency = 0.0; ///< a in sin^2(a y); escape kernel only

  static IntegrandSpec escape(double delta, double t)
  {
    return {Integrand::escape_kernel, delta / std::sqrt(t)};
  }

  double operator()(double y) const noexcept
  {
    // s = sin(y^2/2) / y^2, finite at the origin
    const double y2 = y * y;
    const double s = y < 1e-4 ? 0.5 - y2 * y2 / 48.0 : std::sin(0.5 * y2) / y2;
    switch (kind) {
    case Integrand::zero:
      return 0.0;
    case Integrand::free_constant:
      return s * s;
    case Integrand::confined_constant:
      return s * s * y2;
    case Integrand::escape_kernel: {
      const double sa = std::sin(frequency * y);
      return sa * sa * s * s;
    }
    }
    return 0.0;
  }
};

struct Domain
{
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

inline double free_constant_closed_form() { return std::sqrt(pi) / (3.0 * std::sqrt(2.0)); }
inline double confined_constant_closed_form() { return std::sqrt(pi) / (2.0 * std::sqrt(2.0)); }

namespace detail {

/// Half-amplitude bound on |(1/2) int_Y^inf g(y) cos(y^2) dy| for the integrand's envelope g.
inline double oscillatory_tail_bound(const IntegrandSpec& spec, double y)
{
  switch (spec.kind) {
  case Integrand::zero:
    return 0.0;
  case Integrand::free_constant:
    return 0.5 / std::pow(y, 5);
  case Integrand::confined_constant:
    return 0.5 / std::pow(y, 3);
  case Integrand::escape_kernel: {
    const double a = spec.frequency;
    const double s = std::min(1.0, a * a * y * y);
    return 0.5 * (s / (2.0 * std::pow(y, 5)) + a / (8.0 * std::pow(y, 4)) + 1.0 / (2.0 * std::pow(y, 5)));
  }
  }
  return 0.0;
}

/// (1/2) int_Y^inf g(y) dy for the non-oscillatory part of the tail.
inline QuadratureResult mean_tail(const IntegrandSpec& spec, double y, double tol)
{
  switch (spec.kind) {
  case Integrand::zero:
    return {};
  case Integrand::free_constant:
    return {1.0 / (6.0 * y * y * y), 0.0, 0};
  case Integrand::confined_constant:
    return {0.5 / y, 0.0, 0};
  case Integrand::escape_kernel:
    break;
  }

  // (1/2) sin^2(a y) / y^4 on [Y, Z] piecewise over half-periods of sin(a y),
  // plus the mean-value estimate 1/(12 Z^3) for [Z, inf) with that as its error.
  const double a = spec.frequency;
  if (a == 0.0)
    return {};
  const double z = std::max(2.0 * y, std::cbrt(1.0 / (1.5 * tol)));
  const double step = pi / a;
  const auto g = [a](double v) {
    const double s = std::sin(a * v);
    const double v2 = v * v;
    return 0.5 * s * s / (v2 * v2);
  };
  QuadratureResult out;
  const double pieces = std::ceil((z - y) / step);
  const double width = pieces > 1e6 ? (z - y) / 1e6 : step;
  double left = y;
  const double piece_tol = 0.25 * tol * width / (z - y);
  while (left < z) {
    const double right = std::min(z, left + width);
    const auto r = integrate_adaptive(g, left, right, piece_tol);
    out.value += r.value;
    out.error += r.error;
    out.intervals += r.intervals;
    left = right;
  }
  const double rest = 1.0 / (12.0 * z * z * z);
  out.value += rest;
  out.error += rest;
  return out;
}

} // namespace detail

/// Integral of a tagged integrand over [lo, hi] (hi may be +inf) with an
/// estimated absolute error below tol. Throws NonConvergence otherwise.
inline QuadratureResult adaptive_quadrature(const IntegrandSpec& spec, Domain domain, double tol)
{
  if (!(tol > 0.0))
    throw std::invalid_argument("adaptive_quadrature: tol must be > 0");
  if (!(domain.lo >= 0.0) || !(domain.hi >= domain.lo))
    throw std::invalid_argument("adaptive_quadrature: need 0 <= lo <= hi");
  if (spec.kind == Integrand::escape_kernel && !(spec.frequency >= 0.0))
    throw std::invalid_argument("adaptive_quadrature: escape kernel frequency must be >= 0");
  if (spec.kind == Integrand::zero || (spec.kind == Integrand::escape_kernel && spec.frequency == 0.0)) {
    // identically zero; still exercise the quadrature on finite ranges
    if (std::isfinite(domain.hi))
      return integrate_adaptive(spec, domain.lo, domain.hi, tol);
    return {};
  }

  const bool infinite = !std::isfinite(domain.hi);
  double cut = domain.hi;
  if (infinite) {
    cut = std::max({3.0, domain.lo, 1.0});
    while (detail::oscillatory_tail_bound(spec, cut) > 0.25 * tol) {
      cut *= 1.25;
      if (cut > 1e5)
        throw NonConvergence("adaptive_quadrature: tail cut-off exceeds 1e5", 0.0,
                             detail::oscillatory_tail_bound(spec, cut), 0);
    }
  }

  // Breakpoints: zeros of sin(y^2/2) beyond y = 3 and, for the escape kernel,
  // zeros of sin(a y).
  std::vector<double> points{domain.lo};
  const double lo = domain.lo;
  for (double k = std::max(1.0, std::ceil(lo * lo / (2.0 * pi))); ; k += 1.0) {
    const double p = std::sqrt(2.0 * pi * k);
    if (p >= cut)
      break;
    if (p > lo && p > 3.0)
      points.push_back(p);
  }
  if (spec.kind == Integrand::escape_kernel) {
    const double step = pi / spec.frequency;
    const double count = (cut - lo) / step;
    if (count > 2e6)
      throw NonConvergence("adaptive_quadrature: escape kernel oscillates too fast for subdivision", 0.0,
                           0.0, 0);
    for (double k = std::floor(lo / step) + 1.0; ; k += 1.0) {
      const double p = k * step;
      if (p >= cut)
        break;
      if (p > lo)
        points.push_back(p);
    }
  }
  points.push_back(cut);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  const double body_tol = infinite ? 0.5 * tol : tol;
  const double span = cut - lo;
  QuadratureResult out;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double piece_tol = body_tol * (points[i] - points[i - 1]) / span;
    const auto r = integrate_adaptive(spec, points[i - 1], points[i], piece_tol);
    out.value += r.value;
    out.error += r.error;
    out.intervals += r.intervals;
  }

  if (infinite) {
    const auto mean = detail::mean_tail(spec, cut, 0.2 * tol);
    out.value += mean.value;
    out.error += mean.error + detail::oscillatory_tail_bound(spec, cut);
    out.intervals += mean.intervals;
  }
  if (!(out.error < tol))
    throw NonConvergence("adaptive_quadrature: error estimate above tolerance", out.value, out.error,
                         out.intervals);
  return out;
}

} // namespace sqwell
