#include "hardy/construct.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hardy;
using namespace hardy::construct;

namespace {

std::vector<Vec> random_points(int n, int count, unsigned seed, double lo = 0.3, double hi = 3.0)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> R(lo, hi);
  std::vector<Vec> pts;
  while (int(pts.size()) < count) {
    Vec x(n);
    for (int i = 0; i < n; ++i)
      x[i] = N(rng);
    if (x.norm() < 1e-8)
      continue;
    pts.push_back(R(rng) * x.normalized());
  }
  return pts;
}

} // namespace

TEST(Field, ClosedGradientMatchesDifferences)
{
  auto f = power_field(3, -1.0);
  for (const Vec& x : random_points(3, 50, 1)) {
    const Vec a = f.grad(x);
    const Vec b = fd_gradient(f.value, x);
    EXPECT_LT((a - b).norm(), 1e-5 * a.norm());
  }
}

TEST(Field, NonPositiveNamesPoint)
{
  ScalarField f{2, [](const Vec& x) { return x[0]; }, {}, "x1"};
  Vec x(2);
  x << -1.0, 0.5;
  try {
    f.positive_at(x);
    FAIL();
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("(-1, 0.5)"), std::string::npos);
  }
}

TEST(PairWeight, ClassicalHardy)
{
  auto w = hardy_weight_pair(power_field(3, -1.0), constant_field(3));
  for (const Vec& x : random_points(3, 100, 2))
    EXPECT_NEAR(w(x) * x.squaredNorm(), 0.25, 1e-12);
}

TEST(PairWeight, IdenticalFieldsDegenerate)
{
  auto v = power_field(3, -1.0);
  auto pts = random_points(3, 10, 3);
  auto w = hardy_weight_pair(v, v, {}, pts);
  EXPECT_TRUE(w.provenance.degenerate);
  for (const Vec& x : pts)
    EXPECT_EQ(w(x), 0.0);
}

TEST(PairWeight, LerayDisk)
{
  auto v0 = radial_field(
    2, [](double r) { return -std::log(r); }, [](double r) { return -1.0 / r; });
  auto w = hardy_weight_pair(v0, constant_field(2));
  for (const Vec& x : random_points(2, 100, 4, 0.01, 0.95)) {
    const double r = x.norm(), l = std::log(r);
    EXPECT_NEAR(w(x), 1.0 / (4.0 * r * r * l * l), 1e-10 * w(x));
  }
}

TEST(PairWeight, ScalingAndSymmetry)
{
  auto v0 = power_field(4, -2.0);
  Vec c(4);
  c << 1.0, 0.0, 0.0, 0.0;
  auto v1 = power_field(4, -2.0, c);
  auto s0 = v0, s1 = v1;
  s0.value = [v0](const Vec& x) { return 3.5 * v0(x); };
  s0.gradient = [v0](const Vec& x) -> Vec { return 3.5 * v0.grad(x); };
  s1.value = [v1](const Vec& x) { return 0.01 * v1(x); };
  s1.gradient = [v1](const Vec& x) -> Vec { return 0.01 * v1.grad(x); };
  auto w = hardy_weight_pair(v0, v1), ws = hardy_weight_pair(s0, s1),
       wr = hardy_weight_pair(v1, v0);
  for (const Vec& x : random_points(4, 100, 5)) {
    EXPECT_NEAR(ws(x), w(x), 1e-10 * w(x));
    EXPECT_NEAR(wr(x), w(x), 1e-14 * w(x));
  }
}

TEST(PairWeight, AnisotropicMetric)
{
  MetricSpec m;
  m.A = [](const Vec&) {
    Mat a = Mat::Identity(3, 3);
    a(0, 0) = 2.0;
    return a;
  };
  auto w = hardy_weight_pair(power_field(3, -1.0), constant_field(3), m);
  Vec x(3);
  x << 1.0, 0.0, 0.0;
  EXPECT_NEAR(w(x), 0.5, 1e-12);
}

TEST(MultiWeight, MatchesPairAtHalf)
{
  auto v0 = power_field(3, -1.0);
  auto v1 = constant_field(3);
  auto wp = hardy_weight_pair(v0, v1);
  auto wm = hardy_weight_multi({v0, v1}, {0.5, 0.5});
  for (const Vec& x : random_points(3, 100, 6))
    EXPECT_NEAR(wm(x), wp(x), 1e-12 * wp(x));
}

TEST(MultiWeight, SingleActiveVanishes)
{
  Vec e(3);
  e << 1.0, 0.0, 0.0;
  auto wm = hardy_weight_multi({power_field(3, -1.0, e), power_field(3, -1.0, -e),
                                constant_field(3)},
                               {1.0, 0.0, 0.0});
  for (const Vec& x : random_points(3, 20, 7))
    EXPECT_EQ(wm(x), 0.0);
}

TEST(MultiWeight, TwoPolesAtOrigin)
{
  Vec e(3);
  e << 1.0, 0.0, 0.0;
  auto wm = hardy_weight_multi({constant_field(3), power_field(3, -1.0, e),
                                power_field(3, -1.0, -e)},
                               {1.0 / 3, 1.0 / 3, 1.0 / 3});
  EXPECT_NEAR(wm(Vec::Zero(3)), 2.0 / 3.0, 1e-12);
}

TEST(MultiWeight, Errors)
{
  auto v = constant_field(3);
  EXPECT_THROW(hardy_weight_multi({v}, {1.0}), std::invalid_argument);
  EXPECT_THROW(hardy_weight_multi({v, v}, {0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(hardy_weight_multi({v, v}, {1.5, -0.5}), std::invalid_argument);
}

TEST(Solutions, KindByLambda)
{
  auto v0 = power_field(3, -1.0);
  auto v1 = constant_field(3);
  EXPECT_EQ(associated_solutions(v0, v1, 0.5).kind, SolutionKind::subcritical_pair);
  EXPECT_EQ(associated_solutions(v0, v1, 1.0).kind, SolutionKind::critical_log);
  EXPECT_EQ(associated_solutions(v0, v1, 1.5).kind, SolutionKind::oscillatory_pair);
}

TEST(Solutions, PowerPairAtZero)
{
  auto b = associated_solutions(power_field(3, -1.0), constant_field(3), 0.0);
  for (const Vec& x : random_points(3, 20, 8)) {
    EXPECT_NEAR(b.members[0](x), 1.0, 1e-14);
    EXPECT_NEAR(b.members[1](x), 1.0 / x.norm(), 1e-14);
  }
}

TEST(Solutions, LogPairAtOne)
{
  auto b = associated_solutions(power_field(3, -1.0), constant_field(3), 1.0);
  for (const Vec& x : random_points(3, 20, 9)) {
    const double r = x.norm();
    EXPECT_NEAR(b.members[0](x), std::pow(r, -0.5), 1e-14);
    EXPECT_NEAR(b.members[1](x), std::pow(r, -0.5) * std::log(1.0 / r), 1e-13);
  }
}

TEST(Solutions, OscillatoryZerosSpacing)
{
  auto b = associated_solutions(power_field(3, -1.0), constant_field(3), 2.0);
  EXPECT_DOUBLE_EQ(b.xi, 0.5);
  Vec x = Vec::Zero(3);
  for (double r : {0.1, 1.0, 7.0}) {
    x[0] = r;
    EXPECT_NEAR(b.members[0](x), std::pow(r, -0.5) * std::cos(0.5 * std::log(r)), 1e-14);
  }
  // Consecutive zeros of cos(log(r)/2) lie 2 pi apart in log r.
  x[0] = std::exp(pi);
  EXPECT_NEAR(b.members[0](x), 0.0, 1e-14);
  x[0] = std::exp(3.0 * pi);
  EXPECT_NEAR(b.members[0](x), 0.0, 1e-14);
}

TEST(Solutions, ResidualIdentity)
{
  Vec c(3);
  c << 0.5, -0.25, 0.0;
  auto v0 = power_field(3, -1.0);
  auto v1 = power_field(3, -1.0, c);
  auto W = hardy_weight_pair(v0, v1);
  for (double lambda : {0.0, 0.5, 1.0, 2.0}) {
    auto b = associated_solutions(v0, v1, lambda);
    for (const Vec& x : random_points(3, 30, 10, 1.5, 3.0))
      for (const auto& w : b.members) {
        if (std::abs(w(x)) < 1e-3 * b.members[0](x) && lambda > 1.0)
          continue;
        EXPECT_LT(schrodinger_residual(w, {}, W.eval, lambda, x), 1e-5) << lambda;
      }
  }
}

TEST(Metric, RejectsIndefinite)
{
  MetricSpec m;
  m.A = [](const Vec&) {
    Mat a = Mat::Identity(2, 2);
    a(1, 1) = -1.0;
    return a;
  };
  EXPECT_THROW(m.validate_at(Vec::Ones(2)), std::domain_error);
}
