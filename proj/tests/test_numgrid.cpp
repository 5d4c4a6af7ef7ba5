#include "hardy/numgrid.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hardy;
using namespace hardy::numgrid;

TEST(LogGrid, GeometricMidpoint)
{
  auto g = make_log_grid(1.0, std::exp(2.0), 3);
  EXPECT_DOUBLE_EQ(g->t(0), 1.0);
  EXPECT_NEAR(g->t(1), std::exp(1.0), 1e-14);
  EXPECT_DOUBLE_EQ(g->t(2), std::exp(2.0));
}

TEST(LogGrid, RejectsBadInput)
{
  EXPECT_THROW(make_log_grid(1.0, 1.0, 5), std::invalid_argument);
  EXPECT_THROW(make_log_grid(-1.0, 1.0, 5), std::invalid_argument);
  EXPECT_THROW(make_log_grid(1.0, 2.0, 2), std::invalid_argument);
  EXPECT_THROW(make_log_grid(1.0, std::numeric_limits<double>::infinity(), 5),
               std::invalid_argument);
  EXPECT_THROW(make_log_grid(std::nan(""), 2.0, 5), std::invalid_argument);
}

TEST(LogGrid, SymmetricAboutOne)
{
  auto g = make_log_grid(1e-4, 1e4, 9);
  EXPECT_NEAR(g->t(4), 1.0, 1e-14);
}

TEST(LogGrid, ConstantRatio)
{
  auto g = make_log_grid(1e-6, 1e6, 8001);
  const double q = g->t(1) / g->t(0);
  for (std::size_t k = 0; k + 1 < g->size(); ++k) {
    ASSERT_LT(g->t(k), g->t(k + 1));
    ASSERT_NEAR(g->t(k + 1) / g->t(k), q, 1e-12 * q);
  }
  EXPECT_EQ(g->t_min(), 1e-6);
  EXPECT_EQ(g->t_max(), 1e6);
}

TEST(SampledFunction, RejectsNonFinite)
{
  auto g = make_log_grid(1.0, 2.0, 3);
  EXPECT_THROW(SampledFunction(g, {1.0, std::nan(""), 1.0}), std::invalid_argument);
  EXPECT_THROW(SampledFunction(g, {1.0, 1.0}), std::invalid_argument);
  EXPECT_TRUE(SampledFunction(g, {1.0, 2.0, 3.0}).positive());
  EXPECT_FALSE(SampledFunction(g, {1.0, 0.0, 3.0}).positive());
}

TEST(Integrate, ReciprocalIsExact)
{
  auto g = make_log_grid(0.5, 4.0, 50);
  auto f = SampledFunction::sample(g, [](double t) { return 1.0 / t; });
  EXPECT_NEAR(integrate(f, 1.0, std::exp(1.0)), 1.0, 1e-13);
}

TEST(Integrate, InverseSquare)
{
  auto g = make_log_grid(1.0, 100.0, 2000);
  auto f = SampledFunction::sample(g, [](double t) { return 1.0 / (t * t); });
  EXPECT_NEAR(integrate(f, 1.0, 100.0), 0.99, 1e-6);
}

TEST(Integrate, ZeroAndRangeErrors)
{
  auto g = make_log_grid(1.0, 10.0, 30);
  auto z = SampledFunction::sample(g, [](double) { return 0.0; });
  EXPECT_EQ(integrate(z, 1.0, 10.0), 0.0);
  EXPECT_THROW(integrate(z, 0.5, 2.0), std::out_of_range);
  EXPECT_THROW(integrate(z, 2.0, 11.0), std::out_of_range);
}

TEST(Integrate, LinearAndAdditive)
{
  auto g = make_log_grid(0.1, 10.0, 301);
  auto f = SampledFunction::sample(g, [](double t) { return std::sin(t) + 2.0; });
  auto h = SampledFunction::sample(g, [](double t) { return t * t; });
  std::vector<double> sum(g->size());
  for (std::size_t k = 0; k < sum.size(); ++k)
    sum[k] = 3.0 * f[k] - 2.0 * h[k];
  SampledFunction s(g, sum);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(std::log(0.1), std::log(10.0));
  for (int i = 0; i < 50; ++i) {
    double a = std::exp(U(rng)), b = std::exp(U(rng)), c = std::exp(U(rng));
    std::array<double, 3> p{a, b, c};
    std::sort(p.begin(), p.end());
    const double whole = integrate(f, p[0], p[2]);
    EXPECT_NEAR(integrate(f, p[0], p[1]) + integrate(f, p[1], p[2]), whole,
                1e-12 * std::max(1.0, std::abs(whole)));
    const double lin = integrate(s, p[0], p[2]);
    EXPECT_NEAR(lin, 3.0 * whole - 2.0 * integrate(h, p[0], p[2]),
                1e-12 * std::max(1.0, std::abs(lin)));
  }
}

TEST(Differentiate, LogIsExact)
{
  auto g = make_log_grid(1.0, 10.0, 4000);
  auto f = SampledFunction::sample(g, [](double t) { return std::log(t); });
  auto d = differentiate(f);
  for (std::size_t k = 1; k + 1 < g->size(); ++k)
    ASSERT_NEAR(d[k] * g->t(k), 1.0, 1e-8);
}

TEST(Differentiate, Constant)
{
  auto g = make_log_grid(1.0, 10.0, 100);
  auto d = differentiate(SampledFunction::sample(g, [](double) { return 4.2; }));
  for (double v : d.values())
    EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Differentiate, Square)
{
  auto g = make_log_grid(1.0, 10.0, 4000);
  auto d = differentiate(SampledFunction::sample(g, [](double t) { return t * t; }));
  for (std::size_t k = 1; k + 1 < g->size(); ++k)
    ASSERT_NEAR(d[k] / (2.0 * g->t(k)), 1.0, 1e-6);
}

TEST(Differentiate, RecoversCumulativeIntegrand)
{
  for (std::size_t m : {500u, 1000u}) {
    auto g = make_log_grid(0.5, 5.0, m);
    auto f = SampledFunction::sample(g, [](double t) { return std::cos(t) + 1.5; });
    auto d = differentiate(cumulative_integral(f));
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < m; ++k)
      worst = std::max(worst, std::abs(d[k] - f[k]));
    EXPECT_LT(worst, 50.0 * g->step() * g->step());
  }
}

TEST(Tail, PowerLawTail)
{
  auto g = make_log_grid(1.0, 1e4, 2001);
  auto f = SampledFunction::sample(g, [](double t) { return 1.0 / (t * t); });
  auto r = integrate_to_infinity(f, 1.0);
  EXPECT_TRUE(r.finite);
  EXPECT_NEAR(r.exponent, -2.0, 1e-10);
  EXPECT_NEAR(r.value, 1.0, 1e-5);
  auto slow = SampledFunction::sample(g, [](double t) { return 1.0 / t; });
  EXPECT_FALSE(integrate_to_infinity(slow, 1.0).finite);
}

TEST(Gauss, PolynomialExactness)
{
  auto r = make_gauss_rule(8);
  double s = 0.0;
  for (int i = 0; i < 8; ++i)
    s += r.w[i] * std::pow(r.x[i], 14);
  EXPECT_NEAR(s, 2.0 / 15.0, 1e-14);
  EXPECT_NEAR(integrate_gauss<8>([](double x) { return std::exp(x); }, 0.0, 1.0, 4),
              std::exp(1.0) - 1.0, 1e-14);
}

TEST(Fit, ExactLine)
{
  std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  auto f = linear_fit(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r2, 1.0, 1e-14);
}
