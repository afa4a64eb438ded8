#include <sqwell/quadrature.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

namespace {

using sqwell::Domain;
using sqwell::Integrand;
using sqwell::IntegrandSpec;
using sqwell::pi;

TEST(Adaptive, ElementaryIntegrals)
{
  auto r = sqwell::integrate_adaptive([](double x) { return std::sin(x); }, 0.0, pi, 1e-13);
  EXPECT_NEAR(r.value, 2.0, 1e-13);
  EXPECT_LE(r.error, 1e-13);
  r = sqwell::integrate_adaptive([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-12);
  EXPECT_NEAR(r.value, 2.0 / 3.0, 1e-12);
  EXPECT_GT(r.intervals, 1u);
  r = sqwell::integrate_adaptive([](double) { return 3.0; }, 1.0, 1.0, 1e-12);
  EXPECT_EQ(r.value, 0.0);
}

TEST(Adaptive, BudgetExhaustionReportsProgress)
{
  try {
    sqwell::integrate_adaptive([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, 1e-15, 0.0, 10);
    FAIL() << "expected NonConvergence";
  } catch (const sqwell::NonConvergence& e) {
    EXPECT_GE(e.intervals(), 10u);
    EXPECT_GT(e.error(), 0.0);
    EXPECT_TRUE(std::isfinite(e.estimate()));
  }
  EXPECT_THROW(sqwell::integrate_adaptive([](double x) { return x; }, 1.0, 0.0, 1e-9), std::invalid_argument);
}

TEST(Constants, FreeAndConfinedClosedForms)
{
  const auto c4 = sqwell::adaptive_quadrature({Integrand::free_constant}, Domain{}, 1e-10);
  EXPECT_NEAR(c4.value, std::sqrt(pi) / (3.0 * std::sqrt(2.0)), 1e-9);
  EXPECT_NEAR(c4.value, 0.4177713791, 1e-9);
  EXPECT_LT(c4.error, 1e-10);
  const auto c2 = sqwell::adaptive_quadrature({Integrand::confined_constant}, Domain{}, 1e-8);
  EXPECT_NEAR(c2.value, std::sqrt(pi / 8.0), 1e-7);
  EXPECT_NEAR(c2.value, 0.6266570687, 1e-7);
}

TEST(Constants, ZeroIntegrand)
{
  const auto r = sqwell::adaptive_quadrature({Integrand::zero}, Domain{}, 1e-12);
  EXPECT_EQ(r.value, 0.0);
}

TEST(Kernel, FrozenQuadpackValues)
{
  // QUADPACK on every interval between zeros of sin(y^2/2) and sin(a y), analytic tail
  struct Case
  {
    double a, value;
  } cases[] = {
    {0.09486832980505139, 0.005201322106520599},
    {0.3, 0.04311298274284651},
    {3.0, 0.20920475924676835},
    {30.0, 0.2088858963472817},
  };
  for (const auto& c : cases) {
    const auto r = sqwell::adaptive_quadrature({Integrand::escape_kernel, c.a}, Domain{}, 1e-10 * c.value);
    EXPECT_NEAR(r.value, c.value, 1e-8 * c.value) << c.a;
  }
}

TEST(Kernel, Limits)
{
  // a -> 0: a^2 times the confined constant; a -> inf: half the free constant
  const double small = 1e-3;
  const auto lo = sqwell::adaptive_quadrature({Integrand::escape_kernel, small}, Domain{}, 1e-14);
  EXPECT_NEAR(lo.value / (small * small * std::sqrt(pi / 8.0)), 1.0, 2e-3);
  const auto hi = sqwell::adaptive_quadrature({Integrand::escape_kernel, 300.0}, Domain{}, 1e-10);
  EXPECT_NEAR(hi.value, 0.5 * std::sqrt(pi) / (3.0 * std::sqrt(2.0)), 1e-4);
}

TEST(Kernel, FiniteDomainAgainstSimpson)
{
  const double hi = std::sqrt(2.0 * pi);
  const IntegrandSpec spec{Integrand::confined_constant};
  const int n = 200000;
  const double h = hi / n;
  double s = spec(0.0) + spec(hi);
  for (int i = 1; i < n; ++i)
    s += (i % 2 ? 4.0 : 2.0) * spec(i * h);
  s *= h / 3.0;
  const auto r = sqwell::adaptive_quadrature(spec, Domain{0.0, hi}, 1e-12);
  EXPECT_NEAR(r.value, s, 1e-11);
}

TEST(Kernel, IntegrandIsSmoothAtTheOrigin)
{
  const IntegrandSpec spec{Integrand::escape_kernel, 0.7};
  EXPECT_EQ(spec(0.0), 0.0);
  for (double y : {0.5e-4, 0.99e-4}) {
    const double direct = std::pow(std::sin(0.7 * y) * std::sin(0.5 * y * y) / (y * y), 2);
    EXPECT_NEAR(spec(y), direct, 1e-10 * direct) << y;
  }
  EXPECT_NEAR(IntegrandSpec{Integrand::free_constant}(0.0), 0.25, 1e-16);
}

TEST(Kernel, RejectsBadTolerance)
{
  EXPECT_THROW(sqwell::adaptive_quadrature({Integrand::free_constant}, Domain{}, 0.0), std::invalid_argument);
}

} // namespace
