#include "hardy/catalog.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace hardy;
using namespace hardy::catalog;

namespace {

Vec vec(std::initializer_list<double> v)
{
  Vec x(v.size());
  int i = 0;
  for (double a : v)
    x[i++] = a;
  return x;
}

Vec random_point(std::mt19937_64& rng, int n, double scale = 2.0)
{
  std::uniform_real_distribution<double> U(-scale, scale);
  Vec x(n);
  for (int i = 0; i < n; ++i)
    x[i] = U(rng);
  return x;
}

std::vector<Vec> poles_for(int n, int N)
{
  std::vector<Vec> p;
  for (int i = 0; i < N; ++i) {
    Vec x = Vec::Zero(n);
    x[0] = std::cos(2.0 * pi * i / N);
    x[1] = std::sin(2.0 * pi * i / N);
    if (n > 2)
      x[2] = 0.1 * i;
    p.push_back(x);
  }
  return p;
}

} // namespace

TEST(Classical, HardyPunctured)
{
  auto ex = classical("hardy_punctured", {3});
  EXPECT_DOUBLE_EQ(ex.reference_constant, 0.25);
  EXPECT_NEAR(ex.weight(vec({0.0, 2.0, 0.0})), 0.0625, 1e-15);
}

TEST(Classical, Ball)
{
  auto ex = classical("ball", {3});
  EXPECT_NEAR(ex.weight(vec({0.5, 0.0, 0.0})), 4.0, 1e-12);
}

TEST(Classical, LerayMatchesPairConstruction)
{
  auto ex = classical("leray_disk", {2});
  auto v0 = construct::radial_field(
    2, [](double r) { return -std::log(r); }, [](double r) { return -1.0 / r; });
  auto w = construct::hardy_weight_pair(v0, construct::constant_field(2));
  for (double r : {0.01, 0.2, 0.7}) {
    Vec x = vec({r / std::sqrt(2.0), r / std::sqrt(2.0)});
    EXPECT_NEAR(ex.weight(x), w(x), 1e-10 * w(x));
  }
  EXPECT_NE(ex.weight.provenance.notes.find("factor 4"), std::string::npos);
}

TEST(Classical, ConeHemisphere)
{
  EXPECT_NEAR(cap_eigenvalue(3, 0.5 * pi), 2.0, 1e-8);
  EXPECT_NEAR(cap_eigenvalue(4, 0.5 * pi), 3.0, 1e-8);
  EXPECT_NEAR(cap_eigenvalue(2, 0.5 * pi), 1.0, 1e-8);
  EXPECT_NEAR(cap_eigenvalue(2, 1.0), std::pow(pi / 2.0, 2), 1e-8);
  auto ex = classical("cone", {3});
  EXPECT_NEAR(ex.reference_constant, 2.25, 1e-8);
  ExampleParams p{3};
  p.lambda0 = 2.0;
  EXPECT_DOUBLE_EQ(classical("cone", p).reference_constant, 2.25);
}

TEST(Classical, CapEigenvalueDecreasesWithAngle)
{
  double prev = std::numeric_limits<double>::infinity();
  for (double t : {0.3, 0.6, 1.0, 1.5, 2.5}) {
    const double l = cap_eigenvalue(3, t);
    EXPECT_LT(l, prev);
    prev = l;
  }
}

TEST(Classical, OtherEntries)
{
  auto cd = classical("convex_distance", {3, {}, {}, 2.0});
  EXPECT_NEAR(cd.weight(vec({1.0, 0.0, 0.0})), 0.25, 1e-15);
  EXPECT_NEAR(classical("one_dim_halfline", {1}).weight(vec({2.0})), 1.0 / 16.0, 1e-15);
  auto m = classical("one_dim_massive", {1});
  EXPECT_EQ(m.weight(vec({-3.0})), 1.0);
  EXPECT_EQ(m.op.V(vec({0.0})), 1.0);
  auto hp = classical("halfspace_poisson", {3});
  EXPECT_NEAR(hp.weight(vec({0.0, 0.0, 1.0})), 0.25 * (1.0 + 3.0), 1e-15);
}

TEST(Classical, HalfspacePoissonFromPair)
{
  const int n = 3;
  construct::ScalarField k{n, [](const Vec& x) { return x[2] / std::pow(x.norm(), 3); }, {},
                           "poisson"};
  auto w = construct::hardy_weight_pair(k, construct::constant_field(n));
  auto ex = classical("halfspace_poisson", {n});
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    Vec x = random_point(rng, n);
    x[2] = std::abs(x[2]) + 0.2;
    EXPECT_NEAR(ex.weight(x), w(x), 1e-6 * w(x));
  }
}

TEST(Classical, UnknownNameListsCatalog)
{
  try {
    classical("nope", {3});
    FAIL();
  } catch (const std::invalid_argument& e) {
    const std::string s = e.what();
    for (const auto& name : example_names())
      EXPECT_NE(s.find(name), std::string::npos);
  }
}

TEST(Multipolar, Constants)
{
  EXPECT_NEAR(multipolar_uniform_constant(3, 2), 2.0 / 9.0, 1e-15);
  EXPECT_NEAR(multipolar_w1_constant(3, 2), 0.1875, 1e-15);
  EXPECT_NEAR(multipolar_w2_constant(3, 2), 0.25, 1e-15);
  for (int n : {3, 4, 5})
    for (int N : {2, 3, 4}) {
      const double C = multipolar_uniform_constant(n, N), C1 = multipolar_w1_constant(n, N),
                   C2 = multipolar_w2_constant(n, N), CH = hardy_constant(n);
      EXPECT_LE(C1, C);
      EXPECT_LT(C, C2);
      EXPECT_LE(C2, CH);
    }
}

TEST(Multipolar, UniformAtOrigin)
{
  MultipoleConfig cfg{3, {vec({1, 0, 0}), vec({-1, 0, 0})}, {}, MultipoleVariant::uniform};
  auto res = multipolar_weight(cfg);
  EXPECT_NEAR(res.weight(Vec::Zero(3)), 2.0 / 3.0, 1e-14);
}

TEST(Multipolar, ClosedFormMatchesGenericSum)
{
  std::mt19937_64 rng(11);
  for (int n : {3, 4, 5})
    for (int N : {2, 3, 4}) {
      auto poles = poles_for(n, N);
      MultipoleConfig uni{n, poles, {}, MultipoleVariant::uniform};
      MultipoleConfig gen{n, poles, std::vector<double>(N + 1, 1.0 / (N + 1)),
                          MultipoleVariant::generic};
      gen.alpha.back() = 1.0 - (N) * (1.0 / (N + 1));
      auto a = multipolar_weight(uni).weight;
      auto b = multipolar_weight(gen).weight;
      for (int i = 0; i < 200; ++i) {
        Vec x = random_point(rng, n);
        EXPECT_NEAR(a(x), b(x), 1e-10 * b(x));
      }
    }
}

TEST(Multipolar, GenericEquivalentOfEveryVariant)
{
  std::mt19937_64 rng(13);
  for (int N : {2, 3})
    for (auto v : {MultipoleVariant::uniform, MultipoleVariant::w1,
                   MultipoleVariant::w2}) {
      MultipoleConfig cfg{3, poles_for(3, N), {}, v};
      auto a = multipolar_weight(cfg).weight;
      auto b = multipolar_weight(generic_equivalent(cfg)).weight;
      for (int i = 0; i < 100; ++i) {
        Vec x = random_point(rng, 3);
        EXPECT_NEAR(a(x), b(x), 1e-10 * b(x));
      }
    }
}

TEST(Multipolar, W2IsPairOnlySum)
{
  std::mt19937_64 rng(12);
  auto poles = poles_for(3, 3);
  MultipoleConfig w2{3, poles, {}, MultipoleVariant::w2};
  MultipoleConfig gen{3, poles, {1.0 / 3, 1.0 / 3, 1.0 / 3}, MultipoleVariant::generic};
  auto a = multipolar_weight(w2).weight;
  auto b = multipolar_weight(gen).weight;
  for (int i = 0; i < 100; ++i) {
    Vec x = random_point(rng, 3);
    EXPECT_NEAR(a(x), b(x), 1e-10 * b(x));
  }
}

TEST(Multipolar, NearPoleExtrapolation)
{
  auto poles = poles_for(3, 2);
  Vec dir = vec({0.3, 0.5, 0.8});
  for (auto v : {MultipoleVariant::uniform, MultipoleVariant::w1,
                 MultipoleVariant::w2}) {
    auto res = multipolar_weight({3, poles, {}, v});
    for (const Vec& p : poles)
      EXPECT_NEAR(extrapolate_near_pole(res.weight, p, dir), res.variant_constant, 1e-3);
    EXPECT_NEAR(extrapolate_at_infinity(res.weight, dir), res.infinity_constant, 1e-3);
  }
}

TEST(Multipolar, GenericPoleConstants)
{
  auto poles = poles_for(4, 3);
  MultipoleConfig cfg{4, poles, {0.2, 0.3, 0.5}, MultipoleVariant::generic};
  auto res = multipolar_weight(cfg);
  Vec dir = vec({0.1, 0.7, -0.2, 0.4});
  for (int i = 0; i < 3; ++i)
    EXPECT_NEAR(extrapolate_near_pole(res.weight, poles[i], dir), res.pole_constants[i], 1e-3);
  EXPECT_EQ(res.infinity_constant, 0.0);
  EXPECT_NEAR(extrapolate_at_infinity(res.weight, dir), 0.0, 1e-3);
}

TEST(Multipolar, Errors)
{
  MultipoleConfig cfg{3, {vec({1, 0, 0}), vec({1, 0, 0})}, {}, MultipoleVariant::w1};
  EXPECT_THROW(multipolar_weight(cfg), std::invalid_argument);
  cfg.poles[1] = vec({0, 1, 0});
  cfg.variant = MultipoleVariant::generic;
  cfg.alpha = {0.5, 0.4};
  EXPECT_THROW(multipolar_weight(cfg), std::invalid_argument);
  EXPECT_THROW(parse_variant("W9"), std::invalid_argument);
}

TEST(Halfspace, Values)
{
  auto r = halfspace_weight({0.25, 3});
  EXPECT_NEAR(r.weight(vec({0, 0, 1})), 1.25, 1e-15);
  auto z = halfspace_weight({0.0, 3});
  EXPECT_DOUBLE_EQ(z.beta, -3.0);
  Vec x = vec({0.3, -0.4, 1.2});
  EXPECT_NEAR(z.weight(x), classical("cone", {3}).weight(x), 1e-8 * z.weight(x));
  EXPECT_THROW(halfspace_weight({0.3, 3}), std::invalid_argument);
  EXPECT_THROW(halfspace_weight({-0.1, 3}), std::invalid_argument);
}

TEST(Halfspace, DerivedInvariants)
{
  for (double mu : {0.0, 0.1, 0.25}) {
    HalfspaceConfig c{mu, 4};
    const double a = c.alpha_plus(), b = c.beta();
    EXPECT_NEAR(a * (1.0 - a), mu, 1e-15);
    EXPECT_NEAR(b * (b + 4 - 1 + std::sqrt(1.0 - 4.0 * mu)), 0.0, 1e-13);
    EXPECT_NE(b, 0.0);
  }
}

TEST(Halfspace, GroundStateResidual)
{
  const std::uint64_t seed = 42;
  std::mt19937_64 rng(seed);
  for (double mu : {0.0, 0.125, 0.25}) {
    auto r = halfspace_weight({mu, 3});
    const auto psi = r.ground_state;
    for (int i = 0; i < 200; ++i) {
      Vec x = random_point(rng, 3);
      x[2] = std::abs(x[2]) + 0.3;
      const double res = construct::schrodinger_residual(psi.value, {}, r.weight.eval, 1.0, x);
      ASSERT_LT(res, 1e-6) << "seed " << seed;
      const Vec g = psi.grad(x), f = construct::fd_gradient(psi.value, x);
      ASSERT_LT((g - f).norm(), 1e-5 * g.norm());
    }
  }
}

TEST(PLaplace, ReducesToLinearAtTwo)
{
  auto grid = numgrid::make_log_grid(0.1, 10.0, 101);
  auto v0 = radial::RadialProfile::closed_form(
    grid, [](double r) { return -std::log(r); }, [](double r) { return -1.0 / r; });
  auto v1 = radial::RadialProfile::closed_form(
    grid, [](double) { return 0.0; }, [](double) { return 0.0; });
  for (double a : {0.25, 0.5, 0.8}) {
    auto w = p_hardy_radial({2.0, 3, a}, v0, v1);
    for (std::size_t k = 0; k < grid->size(); ++k) {
      const double r = grid->t(k);
      ASSERT_NEAR(w.values[k], 4.0 * a * (1.0 - a) * 0.25 / (r * r), 1e-12 / (r * r));
    }
  }
}

TEST(PLaplace, SingularFlags)
{
  auto grid = numgrid::make_log_grid(0.1, 10.0, 11);
  auto v0 = radial::RadialProfile::closed_form(
    grid, [](double r) { return std::log(r); }, [](double r) { return 1.0 / r; });
  auto v1 = radial::RadialProfile::closed_form(
    grid, [](double r) { return -std::log(r); }, [](double r) { return -1.0 / r; });
  auto lo = p_hardy_radial({1.5, 3, 0.5}, v0, v1);
  auto hi = p_hardy_radial({3.0, 3, 0.5}, v0, v1);
  for (std::size_t k = 0; k < grid->size(); ++k) {
    EXPECT_TRUE(lo.singular[k]);
    EXPECT_FALSE(hi.singular[k]);
    EXPECT_EQ(hi.values[k], 0.0);
  }
  EXPECT_THROW(p_hardy_radial({1.0, 3, 0.5}, v0, v1), std::invalid_argument);
}

TEST(PLaplace, Caccioppoli)
{
  EXPECT_DOUBLE_EQ(caccioppoli_constant(3.0), 8.0 / 27.0);
  const int n = 3;
  const double p = 2.0;
  auto grid = numgrid::make_log_grid(0.1, 10.0, 51);
  const double e = (p - n) / (p - 1.0);
  auto v = radial::RadialProfile::closed_form(
    grid, [e](double r) { return e * std::log(r); }, [e](double r) { return e / r; });
  auto w = caccioppoli_weight(p, v);
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const double r = grid->t(k);
    EXPECT_NEAR(w[k] * std::pow(r, p), p_green_constant(n, p), 1e-12);
  }
  EXPECT_DOUBLE_EQ(p_green_constant(3, 2.0), 0.25);
}

TEST(Rellich, Constants)
{
  EXPECT_DOUBLE_EQ(rellich_constant(5, 2.0 / 3.0), 25.0 / 16.0);
  EXPECT_DOUBLE_EQ(rellich_constant(5, 2.0 / 3.0), 25.0 * 1.0 / 16.0);
  EXPECT_EQ(rellich_constant(5, 1.0), 0.0);
  double prev = rellich_constant(5, 0.0);
  for (int i = 1; i < 100; ++i) {
    const double c = rellich_constant(5, i / 100.0);
    EXPECT_LT(c, prev);
    prev = c;
  }
}

TEST(Table, CsvMatchesCode)
{
  const std::string path = std::string(HARDY_DATA_DIR) + "/" + constants_csv_filename();
  auto rows = read_constants_csv(path);
  auto table = constants_table();
  ASSERT_EQ(rows.size(), table.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].name, table[i].name);
    EXPECT_EQ(rows[i].n, table[i].n);
    EXPECT_EQ(rows[i].N, table[i].N);
    EXPECT_EQ(rows[i].constant, table[i].constant);
    EXPECT_EQ(rows[i].anchor, table[i].anchor);
  }
  auto ch = lookup_constant("hardy_punctured", 3);
  ASSERT_TRUE(ch);
  EXPECT_EQ(ch->constant, 0.25);
  std::ifstream in(path, std::ios::binary);
  std::stringstream bytes;
  bytes << in.rdbuf();
  EXPECT_EQ(bytes.str(), constants_csv());
}
