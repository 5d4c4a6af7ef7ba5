// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "hardy/cli.hpp"

#include <chrono>
#include <functional>
#include <iostream>

using namespace hardy;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  /// Records a measured quantity and folds its verdict into the criterion.
  void expect(bool ok, const std::string& what, double value)
  {
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << what << " = " << format_sci(value)
           << (ok ? "" : " [out of tolerance]");
  }
  void within(const std::string& what, double value, double expected, double tol)
  {
    expect(std::isfinite(value) && std::abs(value - expected) <= tol, what, value);
  }
  void at_most(const std::string& what, double value, double bound)
  {
    expect(std::isfinite(value) && value <= bound, what, value);
  }
};

constexpr std::uint64_t seed = 42;

Vec point(std::initializer_list<double> v)
{
  Vec x(v.size());
  int i = 0;
  for (double c : v)
    x[i++] = c;
  return x;
}

struct Engine {
  radial::RadialOperator op;
  radial::RadialProfile psi, g0;
  radial::RadialWeight w;
};

Engine engine(int n, RadialFn V)
{
  auto op = radial::make_operator(n, V, numgrid::make_log_grid(1e-6, 1e6, 8001));
  auto psi = radial::solve_radial_solution(op);
  auto green = radial::green_from_psi(psi, op);
  if (!green.g0)
    throw std::domain_error("engine found no Green function");
  auto w = radial::optimal_weight_radial(psi, *green.g0, n);
  return {op, psi, *green.g0, w};
}

void classical_weight_recovery(Outcome& o)
{
  auto e = engine(3, {});
  double gap = 0.0;
  for (std::size_t k = 0; k < e.w.grid->size(); ++k) {
    const double r = e.w.grid->t(k);
    gap = std::max(gap, std::abs(e.w.at(k) * r * r - 0.25));
  }
  o.at_most("max|W r^2 - 1/4|", gap, 1e-10);
  o.within("near-pole limit", radial::near_pole_value(e.w), 0.25, 1e-6);
}

void yukawa_closed_forms(Outcome& o)
{
  auto e = engine(3, [](double) { return 1.0; });
  const double c = 1.0 + 1.0 / std::tanh(1.0);
  o.within("g0(1)", e.g0.value(1.0), std::exp(-1.0), 1e-6);
  o.within("W(1)", e.w(1.0), 0.25 * c * c, 1e-6);
  o.within("W(20)", e.w(20.0), 1.0, 1e-6);
}

void principal_eigenvalue(Outcome& o)
{
  auto e = engine(3, {});
  const double pred = 1.0 + 4.0 * pi * pi / std::pow(8.0 * std::log(10.0), 2);
  auto lam = varify::principal_eigenvalue(varify::assemble(3, {}, e.w.fn(), 1e-4, 1e4, 4000));
  o.within("lambda0 on (1e-4, 1e4)", lam.lambda0, pred, 0.01 * pred);
  auto ctl = varify::principal_eigenvalue(
    varify::assemble(3, {}, [](double) { return 1.0; }, 1.0, 2.0, 4000));
  o.within("constant-weight lambda0 on (1, 2)", ctl.lambda0, pi * pi, 1e-3 * pi * pi);
}

void essential_spectrum_signature(Outcome& o)
{
  const RadialFn W = [](double r) { return 0.25 / (r * r); };
  const double hi = std::exp(20.0 * pi);
  auto wide = radial::make_operator(3, {}, numgrid::make_log_grid(0.5, 2.0 * hi, 2001));
  o.within("sign changes at lambda = 2 on (1, e^{20 pi})",
           radial::oscillation_count(wide, W, 2.0, 1.0, hi).sign_changes, 10.0, 1.0);
  auto op = radial::make_operator(3, {}, numgrid::make_log_grid(1e-6, 1e6, 8001));
  int at_one = 0;
  for (auto [a, b] : std::vector<std::pair<double, double>>{{1e-6, 1e6}, {1.0, 1e5}, {0.01, 3.0}})
    at_one = std::max(at_one, radial::oscillation_count(op, W, 1.0, a, b).sign_changes);
  wide = radial::make_operator(3, {}, numgrid::make_log_grid(0.5, 2.0 * hi, 2001));
  at_one = std::max(at_one, radial::oscillation_count(wide, W, 1.0, 1.0, hi).sign_changes);
  o.within("max sign changes at lambda = 1", at_one, 0.0, 0.0);
  auto e = engine(3, {});
  o.at_most("exterior plateau drift",
            varify::lambda_infinity_sweep(3, {}, e.w.fn(), {1.0, 10.0, 100.0}, 100.0).drift, 0.005);
}

void null_criticality(Outcome& o)
{
  const std::vector<double> as{1e-1, 1e-2, 1e-3, 1e-4};
  o.within("classical slope", varify::null_criticality_probe(radial::classical_pair(3), as).slope,
           0.25, 1e-3);
  o.within("Yukawa slope", varify::null_criticality_probe(radial::yukawa_pair(), as).slope, 0.25,
           1e-3);
}

void spectral_unitarity(Outcome& o)
{
  using namespace spectral;
  const auto xi = xi_grid();
  double plancherel = 0.0, inversion = 0.0;
  for (const auto& p : {radial::classical_pair(3), radial::yukawa_pair()}) {
    std::uint64_t s = seed;
    for (const auto& b : bump_family(p, 4, seed)) {
      auto rep = unitarity_check(p, b.field(p), xi, 100, ++s);
      plancherel = std::max(plancherel, rep.plancherel_error);
      inversion = std::max(inversion, rep.inversion_error);
    }
  }
  o.at_most("Plancherel error", plancherel, 1e-4);
  o.at_most("inversion error", inversion, 1e-4);
  double conj = 0.0;
  for (const auto& p : {radial::classical_pair(3), radial::yukawa_pair()})
    conj = std::max(conj, conjugation_check(power_t(0.25), p, probe_radii(1e-2, 1e1), 0.75).residual);
  o.at_most("conjugation residual for t^{1/4}", conj, 1e-8);
  auto p = radial::classical_pair(3);
  double torus = 0.0;
  for (double rho : {0.5, 1.0})
    for (int k = -2; k <= 2; ++k)
      for (int l = -2; l <= 2; ++l)
        torus = std::max(torus, std::abs(torus_orthonormality(p, rho, k, l) - cplx(k == l ? 1.0 : 0.0)));
  o.at_most("torus Gram deviation", torus, 1e-6);
}

void multipolar_consistency(Outcome& o)
{
  using catalog::MultipoleVariant;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  double agree = 0.0;
  const std::vector<std::vector<Vec>> layouts{
    {point({1, 0, 0}), point({-1, 0, 0})},
    {point({1, 0, 0}), point({-0.5, 0.8, 0}), point({0, -0.3, 1.1})}};
  for (const auto& poles : layouts)
    for (auto v : {MultipoleVariant::uniform, MultipoleVariant::w1, MultipoleVariant::w2}) {
      catalog::MultipoleConfig mc{3, poles, {}, v};
      auto closed = catalog::multipolar_weight(mc).weight;
      auto generic = catalog::multipolar_weight(catalog::generic_equivalent(mc)).weight;
      for (int i = 0; i < 1000; ++i) {
        const Vec x = point({U(rng), U(rng), U(rng)});
        agree = std::max(agree, std::abs(closed(x) - generic(x)) / std::abs(generic(x)));
      }
    }
  o.at_most("closed form vs pair sum", agree, 1e-10);
  const Vec dir = point({0.3, 0.47, 0.64});
  const std::vector<std::pair<MultipoleVariant, double>> expected{
    {MultipoleVariant::uniform, 2.0 / 9.0}, {MultipoleVariant::w1, 0.1875}, {MultipoleVariant::w2, 0.25}};
  const char* names[] = {"C", "C1", "C2"};
  int i = 0;
  for (auto [v, c] : expected) {
    catalog::MultipoleConfig mc{3, layouts[0], {}, v};
    auto w = catalog::multipolar_weight(mc).weight;
    o.within(std::string("near-pole ") + names[i++],
             catalog::extrapolate_near_pole(w, layouts[0][0], dir), c, 1e-3);
  }
  bool ordered = true;
  for (int N : {2, 3}) {
    const double C = catalog::multipolar_uniform_constant(3, N), C1 = catalog::multipolar_w1_constant(3, N),
                 C2 = catalog::multipolar_w2_constant(3, N);
    ordered = ordered && C1 <= C && C < C2 && C2 <= hardy_constant(3);
  }
  o.expect(ordered, "C1 <= C < C2 <= C_H", ordered);
}

void halfspace_ground_state(Outcome& o)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  double worst = 0.0;
  for (double mu : {0.0, 0.125, 0.25}) {
    auto hs = catalog::halfspace_weight({mu, 3});
    for (int i = 0; i < 1000; ++i) {
      const Vec x = point({U(rng), U(rng), std::abs(U(rng)) + 0.1});
      worst = std::max(worst, construct::schrodinger_residual(hs.ground_state.value, {},
                                                              hs.weight.eval, 1.0, x));
    }
  }
  o.at_most("max relative residual", worst, 1e-6);
  o.within("W(0, 0, 1) at mu = 1/4", catalog::halfspace_weight({0.25, 3}).weight(point({0, 0, 1})),
           1.25, 0.0);
}

void rellich_identity(Outcome& o)
{
  const double c = agmon::classical_rellich_constant(5, 2.0 / 3.0);
  o.within("constant", c, 25.0 / 16.0, 0.0);
  o.within("n^2 (n-4)^2 / 16", 5.0 * 5.0 * 1.0 * 1.0 / 16.0, c, 0.0);
  auto cfg = agmon::classical_rellich(5, 2.0 / 3.0);
  construct::OperatorSpec op;
  op.n = 5;
  const double g = agmon::extremal_tilt(5, 2.0 / 3.0);
  auto rep = agmon::rellich_check(cfg, agmon::rellich_family(100, seed, -3.0, 3.0, g - 1.0, g + 1.0), op);
  o.expect(rep.holds && rep.tested == 100, "worst ratio over 100 test functions", rep.worst_ratio);
}

void agmon_length(Outcome& o)
{
  auto m = agmon::agmon_metric(construct::power_field(3, -1.0), construct::constant_field(3));
  o.within("length 1 -> e^4", agmon::agmon_length(m, agmon::radial_segment(3, 1.0, std::exp(4.0))).length,
           2.0, 1e-8);
  o.within("divergence slope over 10..1e4",
           agmon::divergence_probe(m, std::vector<double>{10.0, 100.0, 1000.0, 10000.0}).fit.slope, 0.5, 1e-6);
}

void coarea(Outcome& o)
{
  const double e = std::exp(1.0);
  double worst = 0.0;
  for (const auto& p : {radial::classical_pair(3), radial::yukawa_pair()})
    for (auto [a, b] : std::vector<std::pair<double, double>>{{1, e}, {e, e * e * e}}) {
      auto c = spectral::coarea_identity(p, a, b);
      worst = std::max(worst, std::abs(c.lhs - 0.25 * std::log(b / a)));
    }
  o.at_most("max |lhs - log(b/a)/4|", worst, 1e-6);
}

void caccioppoli(Outcome& o)
{
  o.within("((p-1)/p)^p at p = 3", catalog::caccioppoli_constant(3.0), 8.0 / 27.0, 0.0);
  o.within("p-Green constant n = 3, p = 2", catalog::p_green_constant(3, 2.0), 0.25, 0.0);
}

void determinism(Outcome& o)
{
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "hardy_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> configs{
    {"radial", "subcommand = \"radial\"\nn = 3\npotential = \"constant:1\"\n"},
    {"spectrum", "subcommand = \"spectrum\"\nn = 3\npair = \"yukawa\"\nbumps = 2\nprobes = 20\n"},
    {"multipolar", "subcommand = \"multipolar\"\npoles = [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]\n"}};
  int identical = 0;
  for (const auto& [sub, body] : configs) {
    std::ofstream(dir / (sub + ".toml")) << body;
    std::string reports[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path out = dir / (sub + std::to_string(k));
      std::ostringstream log;
      cli::execute({sub, dir / (sub + ".toml"), out, seed, false}, log);
      std::ifstream in(out / "report.json", std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      reports[k] = ss.str();
    }
    identical += !reports[0].empty() && reports[0] == reports[1];
  }
  o.expect(identical == int(configs.size()), "byte-identical report pairs", identical);
}

} // namespace

int main()
{
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
    {"classical weight recovery", classical_weight_recovery},
    {"Yukawa closed forms", yukawa_closed_forms},
    {"principal eigenvalue certification", principal_eigenvalue},
    {"essential spectrum signature", essential_spectrum_signature},
    {"null-criticality slope", null_criticality},
    {"spectral unitarity", spectral_unitarity},
    {"multipolar consistency", multipolar_consistency},
    {"half-space ground state", halfspace_ground_state},
    {"Rellich identity", rellich_identity},
    {"Agmon length", agmon_length},
    {"coarea identity", coarea},
    {"Caccioppoli constants", caccioppoli},
    {"determinism", determinism}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << (o.detail.tellp() > 0 ? "; " : "") << "error: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << std::setw(2) << i + 1 << " "
              << criteria[i].first << ": " << o.detail.str() << " (" << std::fixed
              << std::setprecision(2) << secs << " s)" << std::defaultfloat << "\n";
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
