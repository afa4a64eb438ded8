#include <sqwell/propagator.hpp>
#include <sqwell/survival.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

namespace {

using sqwell::GridState;
using sqwell::WellConfig;
using sqwell::complex;
using sqwell::pi;

TEST(Propagator, EigenmodeDensityIsStationary)
{
  const auto config = WellConfig::from_shift(0.2);
  const auto start = sqwell::eigenmode_state(config, 513, 1);
  const auto later = sqwell::propagate(start, 1e-4, 2000);
  EXPECT_NEAR(later.t, 0.2, 1e-12);
  for (std::size_t j = 0; j < start.size(); ++j)
    EXPECT_NEAR(std::norm(later.amplitudes[j]), std::norm(start.amplitudes[j]), 1e-11);
}

TEST(Propagator, ZeroStaysZero)
{
  const auto zero = GridState::sample(1.0, 65, [](double) { return complex(0.0, 0.0); });
  const auto later = sqwell::propagate(zero, 1e-3, 100);
  for (const auto& a : later.amplitudes)
    EXPECT_EQ(a, complex(0.0, 0.0));
}

TEST(Propagator, NormIsConservedOverManySteps)
{
  const auto config = WellConfig::from_shift(0.2);
  const auto start = sqwell::quench_initial_state(config, 1025);
  const auto later = sqwell::propagate(start, 1e-5, 10000);
  EXPECT_NEAR(sqwell::norm_squared(later), sqwell::norm_squared(start), 1e-6);
}

TEST(Overlap, EigenmodesAreOrthonormalOnTheGrid)
{
  const auto config = WellConfig::from_shift(0.2);
  const auto m1 = sqwell::eigenmode_state(config, 1001, 1);
  const auto m2 = sqwell::eigenmode_state(config, 1001, 2);
  EXPECT_NEAR(sqwell::norm_squared(m1), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(sqwell::overlap(m1, m2)), 0.0, 1e-14);
  EXPECT_NEAR(sqwell::l2_distance(m1, m1), 0.0, 1e-15);
  EXPECT_NEAR(sqwell::l2_distance(m1, m2), std::sqrt(2.0), 1e-12);
}

TEST(Overlap, GridMismatch)
{
  const auto config = WellConfig::from_shift(0.2);
  const auto a = sqwell::eigenmode_state(config, 101, 1);
  const auto b = sqwell::eigenmode_state(config, 102, 1);
  EXPECT_THROW(sqwell::overlap(a, b), sqwell::GridMismatch);
  EXPECT_THROW(sqwell::l2_distance(a, b), sqwell::GridMismatch);
}

TEST(Overlap, SurvivalAmplitudeMatchesGridOverlap)
{
  const auto config = WellConfig::from_shift(0.2);
  const std::size_t N = 10000;
  const double t = 0.01;
  const auto points = sqwell::node_aligned_points(config, 6000);
  ASSERT_EQ((points - 1) % 6, 0u);
  const auto coeffs = sqwell::ModeCoefficients::compute(config, N);
  const auto psi0 = sqwell::quench_initial_state(config, points);
  const auto psit = sqwell::spectral_state(config, coeffs, points, t);
  const auto grid = sqwell::overlap(psi0, psit);
  const auto series = sqwell::survival_amplitude(config, t, N);
  EXPECT_NEAR(std::abs(grid - series), 0.0, 1e-6);
}

TEST(Oracle, QuenchedStateAgreesWithSpectralSolution)
{
  const auto config = WellConfig::from_shift(0.2);
  const std::size_t points = 4096;
  const double t = 0.01;
  const std::size_t steps = 10000;
  const auto coeffs = sqwell::ModeCoefficients::compute(config, 20000);
  const auto fd = sqwell::propagate(sqwell::quench_initial_state(config, points), t / steps, steps);
  const auto spectral = sqwell::spectral_state(config, coeffs, points, t);
  EXPECT_LT(sqwell::l2_distance(fd, spectral), 1e-3);
}

TEST(Oracle, SecondOrderOnASmoothState)
{
  // c1 phi_1 + c2 phi_2 + c3 phi_3 has an exact solution; halving dx and dt
  // (with dt ~ dx) should cut the error by about 4.
  const auto config = WellConfig::from_shift(0.2);
  const double L = config.width();
  const double c[] = {0.6, 0.7, std::sqrt(1.0 - 0.36 - 0.49)};
  auto exact = [&](double t) {
    return [&, t](double x) {
      complex s{0.0, 0.0};
      for (int n = 1; n <= 3; ++n)
        s += c[n - 1] * std::sqrt(2.0 / L) * std::sin(n * pi * x / L) * std::exp(complex(0.0, -config.energy(n) * t));
      return s;
    };
  };
  const double t = 0.05;
  double previous = 0.0;
  for (std::size_t level = 0; level < 3; ++level) {
    const std::size_t points = (64u << level) + 1;
    const std::size_t steps = 50u << level;
    const auto fd = sqwell::propagate(GridState::sample(L, points, exact(0.0)), t / steps, steps);
    const auto ref = GridState::sample(L, points, exact(t));
    const double err = sqwell::l2_distance(fd, ref);
    if (level > 0) {
      EXPECT_GT(previous / err, 3.5);
      EXPECT_LT(previous / err, 4.5);
    }
    previous = err;
  }
}

TEST(Grid, NodeAlignment)
{
  const auto config = WellConfig::from_shift(0.2);
  EXPECT_EQ(sqwell::node_aligned_points(config, 4096), 4099u);
  EXPECT_EQ(sqwell::node_aligned_points(WellConfig::from_shift(0.0), 100), 100u);
  EXPECT_THROW(GridState::sample(1.0, 2, [](double) { return complex(1.0); }), std::invalid_argument);
  EXPECT_THROW(sqwell::propagate(sqwell::eigenmode_state(config, 11, 1), 0.0, 1), std::invalid_argument);
}

} // namespace
