#pragma once

// Closed-form weights and reference constants.

#include "hardy/construct.hpp"
#include "hardy/radial.hpp"

#include <fstream>
#include <map>
#include <optional>

namespace hardy::catalog {

using construct::HardyWeight;
using construct::ScalarField;

// ---------------------------------------------------------------------------
// Constants table

struct ConstantRow {
  std::string name;
  int n = 0;
  int N = 0;
  double constant = 0.0;
  std::string anchor;
};

inline constexpr int constants_table_version = 1;

inline double multipolar_uniform_constant(int n, int N)
{
  return 4.0 * N / ((N + 1.0) * (N + 1.0)) * hardy_constant(n);
}
inline double multipolar_w1_constant(int n, int N)
{
  return (2.0 * N - 1.0) / (double(N) * N) * hardy_constant(n);
}
inline double multipolar_w2_constant(int n, int N)
{
  return (4.0 * N - 4.0) / (double(N) * N) * hardy_constant(n);
}

/// ((n-2)/2)^4 (1 - mu^2)^2
inline double rellich_constant(int n, double mu)
{
  const double c = hardy_constant(n);
  const double f = 1.0 - mu * mu;
  return c * c * f * f;
}

/// ((p-1)/p)^p
inline double caccioppoli_constant(double p) { return std::pow(p - 1.0, p) / std::pow(p, p); }

/// ((n-p)/p)^p, the Caccioppoli weight constant of the p-Green power r^{(p-n)/(p-1)}.
inline double p_green_constant(int n, double p) { return std::pow(std::abs(n - p) / p, p); }

inline std::vector<ConstantRow> constants_table()
{
  std::vector<ConstantRow> t;
  for (int n : {3, 4, 5, 6})
    t.push_back({"hardy_punctured", n, 0, hardy_constant(n), "classical-hardy-constant"});
  t.push_back({"leray_disk", 2, 0, 0.25, "leray-disk-log-weight"});
  for (int n : {3, 4, 5})
    t.push_back({"ball", n, 0, hardy_constant(n), "ball-boundary-corrected-weight"});
  for (int n : {3, 4, 5})
    t.push_back({"cone_hemisphere", n, 0, 0.25 * n * n, "cone-weight-hemisphere-cross-section"});
  t.push_back({"convex_distance", 0, 0, 0.25, "convex-distance-weight"});
  t.push_back({"one_dim_halfline", 1, 0, 0.25, "one-dimensional-half-line"});
  t.push_back({"one_dim_massive", 1, 0, 1.0, "one-dimensional-massive-line"});
  t.push_back({"halfspace_poisson", 3, 0, 0.25, "half-space-poisson-pair"});
  for (int n : {3, 4, 5})
    for (int N : {2, 3, 4}) {
      t.push_back({"multipolar_uniform", n, N, multipolar_uniform_constant(n, N),
                   "multipolar-uniform-near-pole"});
      t.push_back({"multipolar_w1", n, N, multipolar_w1_constant(n, N),
                   "multipolar-w1-near-pole"});
      t.push_back({"multipolar_w2", n, N, multipolar_w2_constant(n, N),
                   "multipolar-w2-near-pole"});
    }
  t.push_back({"halfspace_ftt_quarter", 3, 0, 1.25, "half-space-weight-at-unit-normal"});
  t.push_back({"rellich", 5, 0, rellich_constant(5, 2.0 / 3.0), "rellich-classical-recovery"});
  for (double mu : {0.0, 0.25, 0.5, 0.75})
    t.push_back({"rellich_mu_" + std::to_string(int(std::lround(mu * 100))), 5, 0,
                 rellich_constant(5, mu), "rellich-prefactor"});
  t.push_back({"caccioppoli_p3", 0, 0, caccioppoli_constant(3.0), "log-caccioppoli-constant"});
  t.push_back({"p_green_caccioppoli_p2", 3, 0, p_green_constant(3, 2.0),
               "p-green-caccioppoli-weight"});
  return t;
}

inline std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string constants_csv()
{
  std::string out = "name,n,N,constant,anchor\n";
  for (const auto& r : constants_table())
    out += r.name + "," + std::to_string(r.n) + "," + std::to_string(r.N) + "," +
           format_double(r.constant) + "," + r.anchor + "\n";
  return out;
}

inline std::string constants_csv_filename()
{
  return "constants_v" + std::to_string(constants_table_version) + ".csv";
}

inline std::vector<ConstantRow> read_constants_csv(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open constants table " + path);
  std::string line;
  std::getline(in, line);
  if (line != "name,n,N,constant,anchor")
    throw std::runtime_error("unexpected constants table header in " + path);
  std::vector<ConstantRow> rows;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      f.push_back(cell);
    if (f.size() != 5)
      throw std::runtime_error("malformed constants row: " + line);
    rows.push_back({f[0], std::stoi(f[1]), std::stoi(f[2]), std::stod(f[3]), f[4]});
  }
  return rows;
}

inline std::optional<ConstantRow> lookup_constant(const std::string& name, int n, int N = 0)
{
  for (const auto& r : constants_table())
    if (r.name == name && (r.n == n || r.n == 0) && r.N == N)
      return r;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Spherical caps

/// Principal Dirichlet eigenvalue of the Laplace-Beltrami operator on the
/// geodesic cap of half-angle theta0 in S^{n-1}, by shooting and bisection.
inline double cap_eigenvalue(int n, double theta0, int steps = 20000)
{
  if (n < 2)
    throw std::invalid_argument("cap_eigenvalue: need n >= 2");
  if (!(theta0 > 0.0 && theta0 < pi))
    throw std::invalid_argument("cap_eigenvalue: half-angle must lie in (0, pi)");
  // Theta'' + (n-2) cot(theta) Theta' + lambda Theta = 0, Theta'(0) = 0.
  auto has_zero = [&](double lambda) {
    const double t0 = std::min(1e-3, 1e-2 * theta0);
    const double a = -lambda / (2.0 * (n - 1));
    const double b = a * (2.0 * (n - 2) / 3.0 - lambda) / (4.0 * (n + 1));
    double y = 1.0 + a * t0 * t0 + b * t0 * t0 * t0 * t0;
    double d = 2.0 * a * t0 + 4.0 * b * t0 * t0 * t0;
    const double h = (theta0 - t0) / steps;
    auto acc = [&](double t, double yy, double dd) {
      return -(n - 2.0) / std::tan(t) * dd - lambda * yy;
    };
    for (int i = 0; i < steps; ++i) {
      const double t = t0 + i * h;
      const double k1y = d, k1d = acc(t, y, d);
      const double k2y = d + 0.5 * h * k1d, k2d = acc(t + 0.5 * h, y + 0.5 * h * k1y, k2y);
      const double k3y = d + 0.5 * h * k2d, k3d = acc(t + 0.5 * h, y + 0.5 * h * k2y, k3y);
      const double k4y = d + h * k3d, k4d = acc(t + h, y + h * k3y, k4y);
      y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
      d += h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
      if (y <= 0.0)
        return true;
    }
    return false;
  };
  double lo = 0.0, hi = 1.0;
  while (!has_zero(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12)
      throw std::runtime_error("cap_eigenvalue: no bracket found");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (has_zero(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Named examples

struct ExampleParams {
  int n = 3;
  std::optional<double> lambda0;   ///< cone: cross-section eigenvalue
  std::optional<double> cap_angle; ///< cone: cap half-angle, used when lambda0 is absent
  double radius = 1.0;             ///< convex_distance: ball radius
};

struct NamedExample {
  std::string name;
  HardyWeight weight;
  construct::OperatorSpec op;
  double reference_constant = 0.0;
  std::string domain_note;
  std::string anchor;
};

inline const std::vector<std::string>& example_names()
{
  static const std::vector<std::string> names = {
    "hardy_punctured", "leray_disk",       "ball",           "cone",
    "convex_distance", "one_dim_halfline", "one_dim_massive", "halfspace_poisson"};
  return names;
}

inline NamedExample classical(const std::string& name, const ExampleParams& prm = {})
{
  const int n = prm.n;
  NamedExample ex;
  ex.name = name;
  ex.weight.n = n;
  ex.op.n = n;
  ex.op.description = "-Laplacian";
  ex.weight.provenance.generators = {name};
  auto need = [&](bool ok, const char* msg) {
    if (!ok)
      throw std::invalid_argument(name + ": " + msg);
  };
  if (name == "hardy_punctured") {
    need(n >= 3, "needs n >= 3");
    const double c = hardy_constant(n);
    ex.weight.eval = [c](const Vec& x) { return c / x.squaredNorm(); };
    ex.weight.provenance.formula = "C_H / |x|^2";
    ex.reference_constant = c;
    ex.domain_note = "R^n minus the origin";
    ex.anchor = "classical-hardy-constant";
  } else if (name == "leray_disk") {
    need(n == 2, "defined for n = 2");
    ex.weight.eval = [](const Vec& x) {
      const double r2 = x.squaredNorm();
      const double l = 0.5 * std::log(r2);
      return 1.0 / (4.0 * r2 * l * l);
    };
    ex.weight.provenance.formula = "1 / (4 |x|^2 log^2 |x|)";
    ex.weight.provenance.notes =
      "follows the displayed inequality with constant 1/4; the inline form (4|x|log|x|)^-2 is off by a factor 4";
    ex.reference_constant = 0.25;
    ex.domain_note = "punctured unit disk";
    ex.anchor = "leray-disk-log-weight";
  } else if (name == "ball") {
    need(n >= 3, "needs n >= 3");
    ex.weight.eval = [n](const Vec& x) {
      const double r = x.norm();
      const double d = r * (1.0 - std::pow(r, n - 2.0));
      return (n - 2.0) * (n - 2.0) / (4.0 * d * d);
    };
    ex.weight.provenance.formula = "(n-2)^2 / (4 (|x| (1 - |x|^{n-2}))^2)";
    ex.reference_constant = hardy_constant(n);
    ex.domain_note = "punctured unit ball";
    ex.anchor = "ball-boundary-corrected-weight";
  } else if (name == "cone") {
    need(n >= 2, "needs n >= 2");
    double lam;
    if (prm.lambda0)
      lam = *prm.lambda0;
    else if (prm.cap_angle)
      lam = cap_eigenvalue(n, *prm.cap_angle);
    else
      lam = cap_eigenvalue(n, 0.5 * pi);
    const double c = 0.25 * ((n - 2.0) * (n - 2.0) + 4.0 * lam);
    ex.weight.eval = [c](const Vec& x) { return c / x.squaredNorm(); };
    ex.weight.provenance.formula = "((n-2)^2 + 4 lambda0) / (4 |x|^2)";
    ex.weight.provenance.notes = "lambda0 = " + format_double(lam);
    ex.reference_constant = c;
    ex.domain_note = "cone over a spherical cap; truncated cones are metadata only";
    ex.anchor = "cone-weight";
  } else if (name == "convex_distance") {
    need(n >= 1, "needs n >= 1");
    const double R = prm.radius;
    need(R > 0.0, "radius must be positive");
    ex.weight.eval = [R](const Vec& x) {
      const double d = R - x.norm();
      return 1.0 / (4.0 * d * d);
    };
    ex.weight.provenance.formula = "1 / (4 delta^2), delta = distance to the boundary of a ball";
    ex.reference_constant = 0.25;
    ex.domain_note = "ball of the given radius (convex)";
    ex.anchor = "convex-distance-weight";
  } else if (name == "one_dim_halfline") {
    need(n == 1, "defined for n = 1");
    ex.weight.eval = [](const Vec& x) { return 1.0 / (4.0 * x[0] * x[0]); };
    ex.weight.provenance.formula = "1 / (4 x^2) from the pair (x, 1)";
    ex.reference_constant = 0.25;
    ex.domain_note = "-u'' on (0, infinity)";
    ex.anchor = "one-dimensional-half-line";
  } else if (name == "one_dim_massive") {
    need(n == 1, "defined for n = 1");
    ex.weight.eval = [](const Vec&) { return 1.0; };
    ex.weight.provenance.formula = "1 from the pair (e^x, e^-x)";
    ex.op.V = [](const Vec&) { return 1.0; };
    ex.op.description = "-u'' + u";
    ex.reference_constant = 1.0;
    ex.domain_note = "-u'' + u on R";
    ex.anchor = "one-dimensional-massive-line";
  } else if (name == "halfspace_poisson") {
    need(n >= 2, "needs n >= 2");
    ex.weight.eval = [n](const Vec& x) {
      const double xn = x[n - 1];
      return 0.25 * (1.0 / (xn * xn) + n * (n - 2.0) / x.squaredNorm());
    };
    ex.weight.provenance.formula = "1/4 (1/x_n^2 + n(n-2)/|x|^2) from the pair (x_n/|x|^n, 1)";
    ex.reference_constant = 0.25;
    ex.domain_note = "upper half-space";
    ex.anchor = "half-space-poisson-pair";
  } else {
    std::string list;
    for (const auto& s : example_names())
      list += (list.empty() ? "" : ", ") + s;
    throw std::invalid_argument("unknown example '" + name + "'; catalog: " + list);
  }
  return ex;
}

// ---------------------------------------------------------------------------
// Multipolar weights

enum class MultipoleVariant { generic, uniform, w1, w2 };

inline MultipoleVariant parse_variant(const std::string& s)
{
  if (s == "generic") return MultipoleVariant::generic;
  if (s == "uniform") return MultipoleVariant::uniform;
  if (s == "W1") return MultipoleVariant::w1;
  if (s == "W2") return MultipoleVariant::w2;
  throw std::invalid_argument("unknown multipolar variant '" + s +
                              "'; expected generic, uniform, W1 or W2");
}

struct MultipoleConfig {
  int n = 3;
  std::vector<Vec> poles;
  std::vector<double> alpha; ///< N entries, or N+1 with alpha[0] for u0 = 1
  MultipoleVariant variant = MultipoleVariant::uniform;
};

struct MultipoleResult {
  HardyWeight weight;
  std::vector<double> pole_constants; ///< limit of |x - x_i|^2 W at each pole
  double infinity_constant = 0.0;     ///< limit of |x|^2 W at infinity
  double variant_constant = 0.0;      ///< tabulated near-pole constant of the variant
};

/// Green functions |x - x_i|^{2-n} with closed-form gradients, optionally preceded by u0 = 1.
inline std::vector<ScalarField> pole_fields(int n, const std::vector<Vec>& poles, bool with_u0)
{
  std::vector<ScalarField> u;
  if (with_u0)
    u.push_back(construct::constant_field(n, 1.0));
  for (const Vec& p : poles)
    u.push_back(construct::power_field(n, 2.0 - n, p));
  return u;
}

inline void validate(const MultipoleConfig& c)
{
  if (c.n < 3)
    throw std::invalid_argument("multipolar: dimension must be >= 3");
  if (c.poles.empty())
    throw std::invalid_argument("multipolar: need at least one pole");
  for (const Vec& p : c.poles)
    if (p.size() != c.n)
      throw std::invalid_argument("multipolar: pole dimension mismatch");
  for (std::size_t i = 0; i < c.poles.size(); ++i)
    for (std::size_t j = i + 1; j < c.poles.size(); ++j)
      if ((c.poles[i] - c.poles[j]).norm() == 0.0)
        throw std::invalid_argument("multipolar: coincident poles " + std::to_string(i) + " and " +
                                    std::to_string(j));
  if (!c.alpha.empty()) {
    double s = 0.0;
    for (double a : c.alpha) {
      if (!(a >= 0.0))
        throw std::invalid_argument("multipolar: weights must be nonnegative");
      s += a;
    }
    if (std::abs(s - 1.0) > 1e-12)
      throw std::invalid_argument("multipolar: weights must sum to 1");
  }
}

inline MultipoleResult multipolar_weight(const MultipoleConfig& cfg)
{
  validate(cfg);
  const int n = cfg.n;
  const int N = int(cfg.poles.size());
  const double cn = (n - 2.0) * (n - 2.0);
  const auto poles = cfg.poles;
  MultipoleResult res;
  res.weight.n = n;
  auto pair_sum = [poles](const Vec& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < poles.size(); ++i)
      for (std::size_t j = i + 1; j < poles.size(); ++j)
        s += (poles[i] - poles[j]).squaredNorm() /
             ((x - poles[i]).squaredNorm() * (x - poles[j]).squaredNorm());
    return s;
  };
  auto single_sum = [poles](const Vec& x) {
    double s = 0.0;
    for (const Vec& p : poles)
      s += 1.0 / (x - p).squaredNorm();
    return s;
  };
  switch (cfg.variant) {
  case MultipoleVariant::generic: {
    if (cfg.alpha.size() != std::size_t(N) && cfg.alpha.size() != std::size_t(N + 1))
      throw std::invalid_argument("multipolar generic: need N or N+1 weights");
    const bool with_u0 = cfg.alpha.size() == std::size_t(N + 1);
    res.weight = construct::hardy_weight_multi(pole_fields(n, poles, with_u0), cfg.alpha);
    const std::size_t off = with_u0 ? 1 : 0;
    for (int i = 0; i < N; ++i) {
      const double a = cfg.alpha[off + i];
      res.pole_constants.push_back(a * (1.0 - a) * cn);
    }
    res.infinity_constant = with_u0 ? cfg.alpha[0] * (1.0 - cfg.alpha[0]) * cn : 0.0;
    res.variant_constant = res.pole_constants.front();
    break;
  }
  case MultipoleVariant::uniform: {
    const double pref = cn / ((N + 1.0) * (N + 1.0));
    res.weight.eval = [=](const Vec& x) { return pref * (single_sum(x) + pair_sum(x)); };
    res.weight.provenance.formula =
      "((n-2)/(N+1))^2 (sum 1/|x-x_i|^2 + sum_{i<j} |x_i-x_j|^2/(|x-x_i|^2 |x-x_j|^2))";
    res.variant_constant = multipolar_uniform_constant(n, N);
    res.pole_constants.assign(N, res.variant_constant);
    res.infinity_constant = res.variant_constant;
    break;
  }
  case MultipoleVariant::w1: {
    const double ch = hardy_constant(n);
    res.weight.eval = [=](const Vec& x) {
      return ch / N * single_sum(x) + ch / (double(N) * N) * pair_sum(x);
    };
    res.weight.provenance.formula =
      "C_H/N sum 1/|x-x_i|^2 + C_H/N^2 sum_{i<j} |x_i-x_j|^2/(|x-x_i|^2 |x-x_j|^2)";
    res.variant_constant = multipolar_w1_constant(n, N);
    res.pole_constants.assign(N, res.variant_constant);
    res.infinity_constant = ch;
    break;
  }
  case MultipoleVariant::w2: {
    const double pref = cn / (double(N) * N);
    res.weight.eval = [=](const Vec& x) { return pref * pair_sum(x); };
    res.weight.provenance.formula = "((n-2)/N)^2 sum_{i<j} |x_i-x_j|^2/(|x-x_i|^2 |x-x_j|^2)";
    res.variant_constant = multipolar_w2_constant(n, N);
    res.pole_constants.assign(N, res.variant_constant);
    res.infinity_constant = 0.0;
    break;
  }
  }
  for (const Vec& p : poles)
    res.weight.provenance.generators.push_back("pole " + format_point(p));
  return res;
}

/// The generic pair-sum configuration that reproduces a closed-form variant term by term.
inline MultipoleConfig generic_equivalent(const MultipoleConfig& cfg)
{
  const std::size_t N = cfg.poles.size();
  MultipoleConfig g{cfg.n, cfg.poles, {}, MultipoleVariant::generic};
  switch (cfg.variant) {
  case MultipoleVariant::generic:
    g.alpha = cfg.alpha;
    break;
  case MultipoleVariant::uniform:
    g.alpha.assign(N + 1, 1.0 / double(N + 1));
    break;
  case MultipoleVariant::w1:
    g.alpha.assign(N + 1, 0.5 / double(N));
    g.alpha[0] = 0.5;
    break;
  case MultipoleVariant::w2:
    g.alpha.assign(N, 1.0 / double(N));
    break;
  }
  return g;
}

/// Richardson extrapolation of |x - pole|^2 W(x) along pole + rho e as rho -> 0,
/// from the radii rho, rho/2, rho/4.
inline double extrapolate_near_pole(const HardyWeight& W, const Vec& pole, const Vec& direction,
                                    double rho = 1e-2)
{
  const Vec e = direction.normalized();
  auto f = [&](double r) { return r * r * W(pole + r * e); };
  const double f1 = f(rho), f2 = f(0.5 * rho), f4 = f(0.25 * rho);
  const double a = 2.0 * f2 - f1, b = 2.0 * f4 - f2;
  return (4.0 * b - a) / 3.0;
}

/// Richardson extrapolation of |x|^2 W(x) along R e as R -> infinity.
inline double extrapolate_at_infinity(const HardyWeight& W, const Vec& direction, double R = 1e3)
{
  const Vec e = direction.normalized();
  auto f = [&](double r) { return r * r * W(r * e); };
  const double f1 = f(R), f2 = f(2.0 * R), f4 = f(4.0 * R);
  const double a = 2.0 * f2 - f1, b = 2.0 * f4 - f2;
  return (4.0 * b - a) / 3.0;
}

// ---------------------------------------------------------------------------
// Half-space

struct HalfspaceConfig {
  double mu = 0.25;
  int n = 3;
  double alpha_plus() const { return 0.5 * (1.0 + std::sqrt(1.0 - 4.0 * mu)); }
  double beta() const { return 1.0 - n - std::sqrt(1.0 - 4.0 * mu); }
};

struct HalfspaceResult {
  HardyWeight weight;
  ScalarField ground_state;
  double alpha_plus = 0.0;
  double beta = 0.0;
};

/// W = mu/x_n^2 + beta^2/(4|x|^2) on x_n > 0, ground state x_n^{alpha+} |x|^{beta/2}.
inline HalfspaceResult halfspace_weight(const HalfspaceConfig& cfg)
{
  if (!(cfg.mu >= 0.0 && cfg.mu <= 0.25))
    throw std::invalid_argument("halfspace: mu must lie in [0, 1/4]");
  if (cfg.n < 2)
    throw std::invalid_argument("halfspace: dimension must be >= 2");
  HalfspaceResult r;
  const int n = cfg.n;
  const double mu = cfg.mu, a = cfg.alpha_plus(), b = cfg.beta();
  r.alpha_plus = a;
  r.beta = b;
  r.weight.n = n;
  r.weight.eval = [=](const Vec& x) {
    const double xn = x[n - 1];
    return mu / (xn * xn) + b * b / (4.0 * x.squaredNorm());
  };
  r.weight.provenance.formula = "mu/x_n^2 + beta^2/(4|x|^2)";
  r.weight.provenance.notes = "alpha_minus branch not implemented";
  r.ground_state.n = n;
  r.ground_state.label = "x_n^{alpha+} |x|^{beta/2}";
  r.ground_state.value = [=](const Vec& x) {
    return std::pow(x[n - 1], a) * std::pow(x.squaredNorm(), 0.25 * b);
  };
  r.ground_state.gradient = [=](const Vec& x) -> Vec {
    const double v = std::pow(x[n - 1], a) * std::pow(x.squaredNorm(), 0.25 * b);
    Vec g = (0.5 * b / x.squaredNorm()) * x;
    g[n - 1] += a / x[n - 1];
    return v * g;
  };
  return r;
}

// ---------------------------------------------------------------------------
// p-Laplacian radial weights

struct PLaplaceConfig {
  double p = 2.0;
  int n = 3;
  double alpha = 0.5;
};

struct PWeight {
  numgrid::GridPtr grid;
  std::vector<double> values;
  std::vector<bool> singular; ///< p < 2 and (log v_alpha)' = 0
};

/// W_alpha = alpha(1-alpha)(p-1) |(log(v0/v1))'|^2 |(log v_alpha)'|^{p-2}, v_alpha = v1^alpha v0^{1-alpha}.
inline PWeight p_hardy_radial(const PLaplaceConfig& cfg, const radial::RadialProfile& v0,
                              const radial::RadialProfile& v1)
{
  if (!(cfg.p > 1.0))
    throw std::invalid_argument("p_hardy_radial: p must exceed 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw std::invalid_argument("p_hardy_radial: alpha must lie in (0, 1)");
  if (v0.size() != v1.size())
    throw std::invalid_argument("p_hardy_radial: profiles on different grids");
  PWeight w;
  w.grid = v0.grid_ptr();
  w.values.resize(v0.size());
  w.singular.assign(v0.size(), false);
  const double a = cfg.alpha, p = cfg.p;
  for (std::size_t k = 0; k < v0.size(); ++k) {
    const double d = v0.dlog_at(k) - v1.dlog_at(k);
    const double da = a * v1.dlog_at(k) + (1.0 - a) * v0.dlog_at(k);
    double f;
    if (da == 0.0) {
      f = p > 2.0 ? 0.0 : (p == 2.0 ? 1.0 : 0.0);
      w.singular[k] = p < 2.0;
    } else {
      f = std::pow(std::abs(da), p - 2.0);
    }
    w.values[k] = a * (1.0 - a) * (p - 1.0) * d * d * f;
  }
  return w;
}

/// alpha^{p-2} alpha (1-alpha) (p-1) |v'/v|^p; at alpha = (p-1)/p the factor is ((p-1)/p)^p.
inline std::vector<double> caccioppoli_weight(double p, const radial::RadialProfile& v,
                                              std::optional<double> alpha = std::nullopt)
{
  if (!(p > 1.0))
    throw std::invalid_argument("caccioppoli_weight: p must exceed 1");
  const double a = alpha.value_or((p - 1.0) / p);
  const double c = std::pow(a, p - 2.0) * a * (1.0 - a) * (p - 1.0);
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k)
    out[k] = c * std::pow(std::abs(v.dlog_at(k)), p);
  return out;
}

} // namespace hardy::catalog
