#include <sqwell/fitting.hpp>
#include <sqwell/spectral.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace {

using sqwell::ModeCoefficients;
using sqwell::Observable;
using sqwell::WellConfig;
using sqwell::pi;

// a_n by composite Simpson on the overlap integral sqrt(2) sqrt(2/L) int_0^1 sin(pi x) sin(n pi x/L) dx.
double overlap_by_simpson(double delta, int n, int intervals = 20000)
{
  const double L = 1.0 + delta;
  const double h = 1.0 / intervals;
  auto f = [&](double x) { return std::sin(pi * x) * std::sin(n * pi * x / L); };
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < intervals; ++i)
    s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return std::sqrt(2.0) * std::sqrt(2.0 / L) * s * h / 3.0;
}

TEST(ModeCoefficient, UnshiftedWellIsTheGroundState)
{
  const auto c = WellConfig::from_shift(0.0);
  EXPECT_NEAR(sqwell::mode_coefficient(c, 1), 1.0, 1e-15);
  for (std::size_t n : {2u, 3u, 10u, 1001u})
    EXPECT_EQ(sqwell::mode_coefficient(c, n), 0.0) << n;
}

TEST(ModeCoefficient, MatchesOverlapQuadrature)
{
  for (double delta : {0.003, 0.2, 0.5, 1.7})
    for (int n : {1, 2, 3, 5, 8, 13})
      EXPECT_NEAR(sqwell::mode_coefficient(WellConfig::from_shift(delta), n), overlap_by_simpson(delta, n), 1e-11)
        << "delta=" << delta << " n=" << n;
  EXPECT_NEAR(sqwell::mode_coefficient(WellConfig::from_shift(0.2), 1), 0.950975481490, 1e-11);
}

TEST(ModeCoefficient, RemovableSingularity)
{
  // L = 2: n = 2 sits exactly on n/L = 1, where a_n = 1/sqrt(L)
  EXPECT_NEAR(sqwell::mode_coefficient(WellConfig::from_shift(1.0), 2), 1.0 / std::sqrt(2.0), 1e-15);
  for (int n : {2, 3, 7}) {
    // just inside and just outside the expansion window around n/L = 1
    for (double h : {4e-7, -4e-7}) {
      const double inside_h = h * 2.4;   // |h| < 1e-6
      const double outside_h = h * 2.6;  // |h| > 1e-6
      const auto inside = WellConfig::from_shift(n / (1.0 + inside_h) - 1.0);
      const auto outside = WellConfig::from_shift(n / (1.0 + outside_h) - 1.0);
      const double a_in = sqwell::mode_coefficient(inside, n);
      const double a_out = sqwell::mode_coefficient(outside, n);
      EXPECT_NEAR(a_in, a_out, 1e-6 * std::abs(a_out)) << n;
      EXPECT_NEAR(a_in, overlap_by_simpson(inside.delta(), n), 1e-10);
    }
  }
}

TEST(ModeCoefficient, RejectsModeZero)
{
  EXPECT_THROW(sqwell::mode_coefficient(WellConfig::from_shift(0.1), 0), std::invalid_argument);
}

class Completeness : public ::testing::TestWithParam<double> {};

TEST_P(Completeness, DefectShrinksMonotonicallyToTolerance)
{
  const auto config = WellConfig::from_shift(GetParam());
  double previous = 1.0;
  for (std::size_t n : {10u, 100u, 1000u, 10000u}) {
    const double defect = ModeCoefficients::compute(config, n).completeness_defect();
    EXPECT_GE(defect, -1e-15);
    EXPECT_LE(defect, previous + 1e-16);
    EXPECT_LE(defect, sqwell::survival_tail_bound(config, n) + 1e-15);
    previous = defect;
  }
  const auto n = sqwell::truncation_for_tolerance(config, Observable::survival, 1e-6);
  EXPECT_LT(ModeCoefficients::compute(config, n).completeness_defect(), 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Shifts, Completeness, ::testing::Values(0.003, 0.05, 0.2));

TEST(ModeCoefficients, OneBasedAccessAndConfig)
{
  const auto config = WellConfig::from_shift(0.2);
  const auto a = ModeCoefficients::compute(config, 5);
  EXPECT_EQ(a.truncation(), 5u);
  EXPECT_EQ(a(1), sqwell::mode_coefficient(config, 1));
  EXPECT_EQ(a(5), sqwell::mode_coefficient(config, 5));
  EXPECT_THROW(a(6), std::out_of_range);
  EXPECT_THROW(ModeCoefficients::compute(config, 0), std::invalid_argument);
  EXPECT_TRUE(a.config() == config);
}

// sum_{n>N} c/n^4 by direct summation plus an integral remainder
double quartic_tail(double c, std::size_t N)
{
  double s = 0.0;
  const std::size_t stop = N + 200000;
  for (std::size_t n = stop; n > N; --n) {
    const double d = static_cast<double>(n);
    s += c / (d * d * d * d);
  }
  const double e = static_cast<double>(stop) + 0.5;
  return s + c / (3.0 * e * e * e);
}

TEST(Truncation, SurvivalToleranceIsMet)
{
  for (double delta : {0.003, 0.2, 1.0}) {
    const auto config = WellConfig::from_shift(delta);
    const double L = config.width();
    for (double tol : {1e-3, 1e-6, 1e-9}) {
      const auto N = sqwell::truncation_for_tolerance(config, Observable::survival, tol);
      // the simple quartic model tail and the true tail both sit below tol
      EXPECT_LT(quartic_tail(8.0 * L * L * L / std::pow(pi, 4), N), tol);
      double true_tail = 0.0;
      for (std::size_t n = N + 200000; n > N; --n) {
        const double a = sqwell::mode_coefficient(config, n);
        true_tail += a * a;
      }
      EXPECT_LT(true_tail, tol) << delta << " " << tol;
      // and N is the smallest count whose bound clears tol
      EXPECT_LT(sqwell::survival_tail_bound(config, N), tol);
      if (N > 2) {
        EXPECT_GE(sqwell::survival_tail_bound(config, N - 1), tol);
      }
    }
  }
}

TEST(Truncation, LooseToleranceGivesTwoModes)
{
  EXPECT_EQ(sqwell::truncation_for_tolerance(WellConfig::from_shift(0.2), Observable::survival, 1.0), 2u);
}

TEST(Truncation, NonIncreasingInTolerance)
{
  const auto config = WellConfig::from_shift(0.05);
  for (auto obs : {Observable::survival, Observable::coefficients}) {
    std::size_t previous = 0;
    for (double tol = 1.0; tol > 1e-12; tol /= 3.0) {
      std::size_t n = 0;
      try {
        n = sqwell::truncation_for_tolerance(config, obs, tol);
      } catch (const sqwell::TruncationCapExceeded&) {
        break;
      }
      EXPECT_GE(n, previous);
      previous = n;
    }
  }
}

TEST(Truncation, CapIsEnforced)
{
  const auto config = WellConfig::from_shift(0.2);
  EXPECT_LE(sqwell::truncation_for_tolerance(config, Observable::survival, 1e-12), sqwell::default_mode_cap);
  EXPECT_THROW(sqwell::truncation_for_tolerance(config, Observable::survival, 1e-12, 100),
               sqwell::TruncationCapExceeded);
  EXPECT_THROW(sqwell::truncation_for_tolerance(config, Observable::coefficients, 1e-9),
               sqwell::TruncationCapExceeded);
  EXPECT_THROW(sqwell::truncation_for_tolerance(config, Observable::survival, 0.0), std::invalid_argument);
}

TEST(Truncation, CoefficientBoundDominatesTheTail)
{
  const auto config = WellConfig::from_shift(0.2);
  const double norm = std::sqrt(2.0 / config.width());
  for (std::size_t N : {10u, 100u, 1000u}) {
    double tail = 0.0;
    const std::size_t stop = 2000000;
    for (std::size_t n = stop; n > N; --n)
      tail += std::abs(sqwell::mode_coefficient(config, n));
    EXPECT_LT(norm * tail, sqwell::coefficient_tail_bound(config, N));
  }
}

TEST(Wavefunction, WallsAndInitialProfile)
{
  const auto config = WellConfig::from_shift(0.2);
  const std::size_t N = 20000;
  const auto a = ModeCoefficients::compute(config, N);
  EXPECT_EQ(std::abs(sqwell::wavefunction(config, a, 0.0, 0.37)), 0.0);
  EXPECT_EQ(std::abs(sqwell::wavefunction(config, a, config.width(), 0.37)), 0.0);
  const double bound = sqwell::coefficient_tail_bound(config, N);
  EXPECT_NEAR(std::abs(sqwell::wavefunction(config, a, 0.5, 0.0)), std::sqrt(2.0), bound);
  EXPECT_NEAR(std::abs(sqwell::wavefunction(config, a, 0.25, 0.0)), 1.0, bound);
  EXPECT_NEAR(std::abs(sqwell::wavefunction(config, a, 1.1, 0.0)), 0.0, bound);
}

TEST(Wavefunction, DomainErrors)
{
  const auto config = WellConfig::from_shift(0.2);
  const auto a = ModeCoefficients::compute(config, 10);
  EXPECT_THROW(sqwell::wavefunction(config, a, -1e-9, 0.0), std::domain_error);
  EXPECT_THROW(sqwell::wavefunction(config, a, 1.2 + 1e-9, 0.0), std::domain_error);
  EXPECT_THROW(sqwell::wavefunction(config, a, 0.5, -1.0), std::domain_error);
  const auto other = ModeCoefficients::compute(WellConfig::from_shift(0.3), 10);
  EXPECT_THROW(sqwell::wavefunction(config, other, 0.5, 0.0), std::invalid_argument);
}

TEST(DensityField, InitialPeakAndWalls)
{
  const auto config = WellConfig::from_shift(0.2);
  const std::size_t N = 20000;
  const auto a = ModeCoefficients::compute(config, N);
  const std::vector<double> xs{0.0, 0.5, config.width()};
  const std::vector<double> ts{0.0};
  const auto field = sqwell::density_field(config, a, xs, ts);
  const double b = sqwell::coefficient_tail_bound(config, N);
  EXPECT_NEAR(field.at(0, 1), 2.0, 2.0 * std::sqrt(2.0) * b + b * b);
  EXPECT_EQ(field.at(0, 0), 0.0);
  EXPECT_EQ(field.at(0, 2), 0.0);
}

TEST(DensityField, RevivalAfterOnePeriod)
{
  const auto config = WellConfig::from_shift(0.2);
  const auto a = ModeCoefficients::compute(config, 2000);
  const auto xs = sqwell::uniform_grid(0.0, config.width(), 97);
  const double T = config.period();
  for (double t : {0.0, 0.013, 0.3 * T}) {
    const std::vector<double> ts{t, t + T};
    const auto field = sqwell::density_field(config, a, xs, ts);
    for (std::size_t j = 0; j < xs.size(); ++j)
      EXPECT_NEAR(field.at(0, j), field.at(1, j), 1e-9) << "t=" << t << " x=" << xs[j];
  }
}

TEST(DensityField, NormIsConserved)
{
  const auto config = WellConfig::from_shift(0.2);
  const auto a = ModeCoefficients::compute(config, 4000);
  const auto xs = sqwell::uniform_grid(0.0, config.width(), 6001);
  const auto ts = sqwell::uniform_grid(0.0, config.period(), 9);
  const auto field = sqwell::density_field(config, a, xs, ts);
  const double defect = a.completeness_defect();
  for (std::size_t i = 0; i < ts.size(); ++i)
    EXPECT_NEAR(field.row_integral(i), 1.0 - defect, 2e-4) << "t=" << ts[i];
}

TEST(DensityField, RejectsBadGrids)
{
  const auto config = WellConfig::from_shift(0.2);
  const auto a = ModeCoefficients::compute(config, 10);
  const std::vector<double> xs{0.0, 2.0};
  const std::vector<double> ts{0.0};
  const std::vector<double> unsorted{0.5, 0.1};
  EXPECT_THROW(sqwell::density_field(config, a, xs, ts), std::domain_error);
  EXPECT_THROW(sqwell::density_field(config, a, unsorted, ts), std::invalid_argument);
}

} // namespace
