#pragma once

// Finite-difference oracle: Crank-Nicolson stepping of i psi_t = -psi_xx on a
// uniform grid over [0, L] with psi = 0 at both walls. The Cayley form
// (1 + i H dt/2)^{-1} (1 - i H dt/2) is unitary for the Hermitian
// second-difference H, so the discrete norm is conserved up to rounding.

#include "sqwell/error.hpp"
#include "sqwell/spectral.hpp"
#include "sqwell/well.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqwell {

using complex = std::complex<double>;

struct GridState
{
  std::vector<double> x;
  std::vector<complex> amplitudes;
  double dx = 0.0;
  double t = 0.0;

  std::size_t size() const noexcept { return x.size(); }

  /// Samples fn on points uniform nodes spanning [0, width]; the wall nodes are set to 0.
  static GridState sample(double width, std::size_t points, const std::function<complex(double)>& fn)
  {
    if (points < 3)
      throw std::invalid_argument("GridState: need at least 3 grid points");
    if (!(width > 0.0))
      throw std::invalid_argument("GridState: width must be > 0");
    GridState s;
    s.dx = width / static_cast<double>(points - 1);
    s.x.resize(points);
    s.amplitudes.resize(points);
    for (std::size_t j = 0; j < points; ++j) {
      s.x[j] = width * static_cast<double>(j) / static_cast<double>(points - 1);
      s.amplitudes[j] = fn(s.x[j]);
    }
    s.x.back() = width;
    s.amplitudes.front() = 0.0;
    s.amplitudes.back() = 0.0;
    return s;
  }
};

/// Smallest point count >= target for which x = 1 falls on a node of the
/// uniform grid over [0, L]; target itself if none exists within +search.
inline std::size_t node_aligned_points(const WellConfig& config, std::size_t target, std::size_t search = 1000)
{
  for (std::size_t k = std::max<std::size_t>(target, 3); k <= target + search; ++k) {
    const double index = static_cast<double>(k - 1) / config.width();
    if (std::abs(index - std::round(index)) < 1e-9 * index)
      return k;
  }
  return target;
}

/// The pre-quench ground state sqrt(2) sin(pi x) on [0, 1], zero on (1, L].
inline GridState quench_initial_state(const WellConfig& config, std::size_t points)
{
  return GridState::sample(config.width(), points, [](double x) {
    return x <= 1.0 ? complex(std::sqrt(2.0) * std::sin(pi * x), 0.0) : complex(0.0, 0.0);
  });
}

/// n-th normalised eigenmode sqrt(2/L) sin(n pi x / L) of the expanded well.
inline GridState eigenmode_state(const WellConfig& config, std::size_t points, std::size_t n)
{
  const double width = config.width();
  const double norm = std::sqrt(2.0 / width);
  return GridState::sample(width, points, [=](double x) {
    return complex(norm * detail::sin_pi(static_cast<double>(n) * x / width), 0.0);
  });
}

/// The spectral series psi_N(x, t) sampled on the same node layout.
inline GridState spectral_state(const WellConfig& config, const ModeCoefficients& coeffs, std::size_t points, double t)
{
  const double width = config.width();
  GridState s = GridState::sample(width, points, [](double) { return complex(0.0, 0.0); });
  parallel_for(points, [&](std::size_t j) { s.amplitudes[j] = wavefunction(config, coeffs, s.x[j], t); });
  s.amplitudes.front() = 0.0;
  s.amplitudes.back() = 0.0;
  s.t = t;
  return s;
}

/// Advances state by steps * dt. The tridiagonal system is factored once
/// (Thomas algorithm) and reused for every step.
inline GridState propagate(GridState state, double dt, std::size_t steps)
{
  if (!(dt > 0.0))
    throw std::invalid_argument("propagate: dt must be > 0");
  const std::size_t n = state.size();
  if (n < 3)
    return state;
  const std::size_t m = n - 2; // interior unknowns
  const complex r(0.0, dt / (2.0 * state.dx * state.dx));
  const complex diag = 1.0 + 2.0 * r;
  const complex off = -r;

  // forward-elimination coefficients for the constant matrix tridiag(off, diag, off)
  std::vector<complex> c_prime(m), inv_denom(m);
  inv_denom[0] = 1.0 / diag;
  c_prime[0] = off * inv_denom[0];
  for (std::size_t i = 1; i < m; ++i) {
    inv_denom[i] = 1.0 / (diag - off * c_prime[i - 1]);
    c_prime[i] = off * inv_denom[i];
  }

  std::vector<complex> rhs(m);
  complex* psi = state.amplitudes.data() + 1;
  for (std::size_t step = 0; step < steps; ++step) {
    // rhs = (1 - i H dt/2) psi; walls are zero
    for (std::size_t i = 0; i < m; ++i) {
      const complex left = i == 0 ? complex(0.0) : psi[i - 1];
      const complex right = i + 1 == m ? complex(0.0) : psi[i + 1];
      rhs[i] = (1.0 - 2.0 * r) * psi[i] + r * (left + right);
    }
    rhs[0] *= inv_denom[0];
    for (std::size_t i = 1; i < m; ++i)
      rhs[i] = (rhs[i] - off * rhs[i - 1]) * inv_denom[i];
    psi[m - 1] = rhs[m - 1];
    for (std::size_t i = m - 1; i-- > 0;)
      psi[i] = rhs[i] - c_prime[i] * psi[i + 1];
  }
  state.amplitudes.front() = 0.0;
  state.amplitudes.back() = 0.0;
  state.t += dt * static_cast<double>(steps);
  return state;
}

namespace detail {

inline void check_same_grid(const GridState& a, const GridState& b)
{
  if (a.size() != b.size() || std::abs(a.dx - b.dx) > 1e-14 * std::abs(a.dx))
    throw GridMismatch("grid states differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                       " points");
}

} // namespace detail

/// Trapezoidal <a|b> = int conj(a) b dx.
inline complex overlap(const GridState& a, const GridState& b)
{
  detail::check_same_grid(a, b);
  complex sum{0.0, 0.0};
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
    sum += w * std::conj(a.amplitudes[j]) * b.amplitudes[j];
  }
  return sum * a.dx;
}

inline double norm_squared(const GridState& s) { return overlap(s, s).real(); }

/// Trapezoidal L2 distance between two states on the same grid.
inline double l2_distance(const GridState& a, const GridState& b)
{
  detail::check_same_grid(a, b);
  double sum = 0.0;
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
    sum += w * std::norm(a.amplitudes[j] - b.amplitudes[j]);
  }
  return std::sqrt(sum * a.dx);
}

} // namespace sqwell
