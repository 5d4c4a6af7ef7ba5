#pragma once

// Agmon metric lengths, Rellich-type inequalities and minimal-growth decay
// ratios for weights from the supersolution construction.

#include "hardy/construct.hpp"
#include "hardy/numgrid.hpp"

#include <optional>
#include <random>

namespace hardy::agmon {

using construct::HardyWeight;
using construct::MetricSpec;
using construct::OperatorSpec;
using construct::PointFn;
using construct::ScalarField;

// ---------------------------------------------------------------------------
// Agmon metric ds^2 = W a_ij dx^i dx^j with [a_ij] = A^{-1}

struct AgmonMetric {
  HardyWeight weight;
  MetricSpec metric;
  /// The pair (v0, v1) behind the weight, when known; enables the log-oscillation bound.
  std::optional<std::pair<ScalarField, ScalarField>> generators;
  /// Domain membership; empty accepts every point where W is finite and nonnegative.
  std::function<bool(const Vec&)> inside;

  double line_element(const Vec& x, const Vec& dir) const
  {
    return std::sqrt(weight(x) * metric.dual_norm2(x, dir));
  }

  void check_point(const Vec& x) const
  {
    if (inside && !inside(x))
      throw std::domain_error("curve leaves the domain at " + format_point(x));
    const double w = weight(x);
    if (!std::isfinite(w) || w < 0.0)
      throw std::domain_error("weight undefined on the curve at " + format_point(x));
  }

  double log_ratio(const Vec& x) const
  {
    return std::log(generators->first.positive_at(x)) - std::log(generators->second.positive_at(x));
  }
};

inline AgmonMetric agmon_metric(const ScalarField& v0, const ScalarField& v1, MetricSpec metric = {})
{
  AgmonMetric m;
  m.weight = construct::hardy_weight_pair(v0, v1, metric);
  m.metric = std::move(metric);
  m.generators = std::make_pair(v0, v1);
  return m;
}

struct AgmonLength {
  double length = 0.0;
  std::optional<double> lower_bound; ///< 1/2 |log(v0/v1)(end) - log(v0/v1)(start)|
  std::size_t evaluations = 0;
};

namespace detail {

template <class F>
double gauss8(F& f, double a, double b)
{
  const auto& rule = numgrid::gauss_rule<8>();
  double s = 0.0;
  for (int i = 0; i < 8; ++i)
    s += rule.w[i] * f(0.5 * (a + b) + 0.5 * (b - a) * rule.x[i]);
  return 0.5 * (b - a) * s;
}

template <class F>
double adaptive_gauss(F& f, double a, double b, double whole, double tol, int depth)
{
  const double m = 0.5 * (a + b);
  const double left = gauss8(f, a, m), right = gauss8(f, m, b);
  if (depth <= 0 || std::abs(left + right - whole) <= tol * std::max(1.0, std::abs(left + right)))
    return left + right;
  return adaptive_gauss(f, a, m, left, tol, depth - 1) +
         adaptive_gauss(f, m, b, right, tol, depth - 1);
}

} // namespace detail

/// Length of the polygon through the curve points in the Agmon metric.
inline AgmonLength agmon_length(const AgmonMetric& m, std::span<const Vec> curve, double tol = 1e-13)
{
  if (curve.size() < 2)
    throw std::invalid_argument("agmon_length: a curve needs at least two points");
  AgmonLength out;
  for (const Vec& x : curve)
    m.check_point(x);
  for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
    const Vec a = curve[k], d = curve[k + 1] - curve[k];
    auto f = [&](double t) {
      ++out.evaluations;
      const Vec x = a + t * d;
      m.check_point(x);
      return m.line_element(x, d);
    };
    out.length += detail::adaptive_gauss(f, 0.0, 1.0, detail::gauss8(f, 0.0, 1.0), tol, 40);
  }
  if (m.generators)
    out.lower_bound = 0.5 * std::abs(m.log_ratio(curve.back()) - m.log_ratio(curve.front()));
  return out;
}

/// Straight radial segment from r1 to r2 along e_1, sampled with `points` nodes.
inline std::vector<Vec> radial_segment(int n, double r1, double r2, std::size_t points = 2)
{
  std::vector<Vec> c;
  for (std::size_t i = 0; i < points; ++i) {
    Vec x = Vec::Zero(n);
    x[0] = r1 + (r2 - r1) * double(i) / double(points - 1);
    c.push_back(x);
  }
  return c;
}

struct Divergence {
  std::vector<double> R, length;
  numgrid::LinearFit fit; ///< length against log R
};

/// Lengths of radial segments 1 -> R; a complete metric makes these unbounded.
inline Divergence divergence_probe(const AgmonMetric& m, std::span<const double> R_list)
{
  Divergence d;
  std::vector<double> logR;
  for (double R : R_list) {
    d.R.push_back(R);
    d.length.push_back(agmon_length(m, radial_segment(m.weight.n, 1.0, R)).length);
    logR.push_back(std::log(R));
  }
  d.fit = numgrid::linear_fit(logR, d.length);
  return d;
}

// ---------------------------------------------------------------------------
// Rellich-type inequalities on radial test functions

/// e^{tilt s} cos^2(pi (s - c) / (2 w)) on |s - c| < w, with s = log r.
struct RadialBump {
  double center = 0.0, width = 1.0, tilt = 0.0;

  double s_lo() const { return center - width; }
  double s_hi() const { return center + width; }

  /// value, d/ds and d^2/ds^2
  std::array<double, 3> eval(double s) const
  {
    if (std::abs(s - center) >= width)
      return {0.0, 0.0, 0.0};
    const double k = pi / (2.0 * width), th = k * (s - center);
    const double c0 = 0.5 * (1.0 + std::cos(2 * th)), c1 = -k * std::sin(2 * th),
                 c2 = -2 * k * k * std::cos(2 * th);
    const double e = std::exp(tilt * s);
    return {e * c0, e * (c1 + tilt * c0), e * (c2 + 2 * tilt * c1 + tilt * tilt * c0)};
  }
};

/// Seeded bumps with centers in [s_lo, s_hi], widths in [0.3, 3] and tilts in [tilt_lo, tilt_hi].
inline std::vector<RadialBump> rellich_family(std::size_t count, std::uint64_t seed,
                                              double s_lo = -3.0, double s_hi = 3.0,
                                              double tilt_lo = 0.0, double tilt_hi = 0.0)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> C(s_lo, s_hi), Wd(0.3, 3.0), T(tilt_lo, tilt_hi);
  std::vector<RadialBump> out(count);
  for (auto& b : out) {
    b.center = C(rng);
    b.width = Wd(rng);
    b.tilt = T(rng);
  }
  return out;
}

/// Tilt making e^{tilt s} balance the classical weights; wide bumps then approach the sharp constant.
inline double extremal_tilt(int n, double mu) { return 0.5 * (n - 2.0) * (mu - 1.0); }

struct RellichConfig {
  double mu = 0.0;
  double lambda = 1.0;
  ScalarField v0, v1;
  HardyWeight weight;
  double alpha = 0.5; ///< convex parameter of the Hardy-Rellich variant

  void validate() const
  {
    if (!(mu >= 0.0 && mu < 1.0))
      throw std::invalid_argument("rellich: mu must lie in [0, 1)");
    if (!(lambda >= 0.0 && lambda <= 1.0))
      throw std::invalid_argument("rellich: lambda must lie in [0, 1]");
    if (!(alpha >= 0.0 && alpha <= 1.0))
      throw std::invalid_argument("rellich: alpha must lie in [0, 1]");
  }
};

/// Integrals of one radial test function, each against dx.
struct RellichTerms {
  double weighted_mass = 0.0; ///< int u^2 W (v0/v1)^mu
  double operator_sq = 0.0;   ///< int (Pu)^2 W^{-1} (v0/v1)^mu
  double plain_mass = 0.0;    ///< int u^2 W
  double plain_sq = 0.0;      ///< int (Pu)^2 W^{-1}
  double energy = 0.0;        ///< int u Pu = int |grad u|^2 + V u^2
};

inline RellichTerms rellich_terms(const RellichConfig& cfg, const OperatorSpec& op,
                                  const RadialBump& b, int panels = 400)
{
  if (!op.metric.identity())
    throw std::invalid_argument("rellich: radial test functions need A = identity");
  const int n = op.n;
  RellichTerms t;
  const auto& rule = numgrid::gauss_rule<8>();
  const double h = (b.s_hi() - b.s_lo()) / panels, area = sphere_area(n);
  Vec x = Vec::Zero(n);
  for (int p = 0; p < panels; ++p) {
    const double mid = b.s_lo() + (p + 0.5) * h;
    for (int i = 0; i < 8; ++i) {
      const double s = mid + 0.5 * h * rule.x[i], r = std::exp(s);
      x[0] = r;
      const double W = cfg.weight(x);
      if (!(W > 0.0))
        throw std::domain_error("rellich: weight vanishes on the support at " + format_point(x));
      const auto [u, us, uss] = b.eval(s);
      const double V = op.V ? op.V(x) : 0.0;
      const double Pu = -(uss + (n - 2.0) * us) / (r * r) + V * u;
      const double rho = std::exp(cfg.mu * (std::log(cfg.v0.positive_at(x)) -
                                            std::log(cfg.v1.positive_at(x))));
      const double dnu = 0.5 * h * rule.w[i] * area * std::exp(n * s);
      t.weighted_mass += dnu * u * u * W * rho;
      t.operator_sq += dnu * Pu * Pu / W * rho;
      t.plain_mass += dnu * u * u * W;
      t.plain_sq += dnu * Pu * Pu / W;
      t.energy += dnu * (us * us / (r * r) + V * u * u);
    }
  }
  return t;
}

struct RellichReport {
  double prefactor = 0.0;     ///< lambda (1 - mu^2)^2
  double worst_ratio = 0.0;   ///< max lhs / rhs over the test functions
  bool holds = false;         ///< lhs <= rhs + 1e-9 with rhs normalized to 1
  double worst_ratio_b = 0.0; ///< Hardy-Rellich variant with parameter alpha
  bool holds_b = false;
  std::size_t tested = 0;
};

inline RellichReport rellich_check(const RellichConfig& cfg, std::span<const RadialBump> tests,
                                   const OperatorSpec& op)
{
  cfg.validate();
  RellichReport rep;
  const double f = 1.0 - cfg.mu * cfg.mu;
  rep.prefactor = cfg.lambda * f * f;
  rep.holds = rep.holds_b = true;
  for (const auto& b : tests) {
    const auto t = rellich_terms(cfg, op, b);
    const double ratio = rep.prefactor * t.weighted_mass / t.operator_sq;
    rep.worst_ratio = std::max(rep.worst_ratio, ratio);
    rep.holds = rep.holds && ratio <= 1.0 + 1e-9;
    const double rhs_b = cfg.alpha * t.energy + (1.0 - cfg.alpha) * t.plain_sq;
    const double ratio_b = cfg.lambda * t.plain_mass / rhs_b;
    rep.worst_ratio_b = std::max(rep.worst_ratio_b, ratio_b);
    rep.holds_b = rep.holds_b && ratio_b <= 1.0 + 1e-9;
    ++rep.tested;
  }
  return rep;
}

/// Classical configuration: P = -Delta in R^n \ {0}, pair (|x|^{2-n}, 1), W = C_H / |x|^2.
inline RellichConfig classical_rellich(int n, double mu, double lambda = 1.0)
{
  RellichConfig c;
  c.mu = mu;
  c.lambda = lambda;
  c.v0 = construct::power_field(n, 2.0 - n);
  c.v1 = construct::constant_field(n);
  c.weight = construct::hardy_weight_pair(c.v0, c.v1);
  return c;
}

/// Constant of the unweighted form: ((n-2)/2)^4 (1 - mu^2)^2 lambda.
inline double classical_rellich_constant(int n, double mu, double lambda = 1.0)
{
  const double a = (n - 2.0) * (n - 2.0), f = a - a * mu * mu;
  return lambda * f * f / 16.0;
}

// ---------------------------------------------------------------------------
// Integration-by-parts identity (Pu, u v^2) = (P(vu), vu) + 1/2 (u^2, P v^2) - (Pv, u^2 v)

struct IbpReport {
  double lhs = 0.0, rhs = 0.0;
  double relative_error = 0.0;
};

/// Random radial u (sum of cos^2 bumps) and v = exp(phi) with a random trigonometric phi,
/// P = -Delta, all forms integrated in s with exact derivatives.
inline IbpReport ibp_identity_check(int n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<RadialBump> bumps(3);
  std::vector<double> coef(3), breaks;
  for (std::size_t k = 0; k < bumps.size(); ++k) {
    bumps[k] = {2.0 * U(rng), 0.6 + 0.5 * (U(rng) + 1.0)};
    coef[k] = U(rng);
    breaks.push_back(bumps[k].s_lo());
    breaks.push_back(bumps[k].s_hi());
  }
  std::array<double, 3> amp, freq, phase;
  for (int k = 0; k < 3; ++k) {
    amp[k] = 0.5 * U(rng);
    freq[k] = 1.0 + U(rng);
    phase[k] = pi * U(rng);
  }
  std::sort(breaks.begin(), breaks.end());

  // Jets (f, f_s, f_ss) in s.
  using Jet = std::array<double, 3>;
  auto u_jet = [&](double s) {
    Jet j{0, 0, 0};
    for (std::size_t k = 0; k < bumps.size(); ++k) {
      const auto e = bumps[k].eval(s);
      for (int d = 0; d < 3; ++d)
        j[d] += coef[k] * e[d];
    }
    return j;
  };
  auto v_jet = [&](double s, double power) {
    double phi = 0, d1 = 0, d2 = 0;
    for (int k = 0; k < 3; ++k) {
      const double a = freq[k] * s + phase[k];
      phi += amp[k] * std::cos(a);
      d1 -= amp[k] * freq[k] * std::sin(a);
      d2 -= amp[k] * freq[k] * freq[k] * std::cos(a);
    }
    const double v = std::exp(power * phi);
    return Jet{v, power * d1 * v, (power * d2 + power * power * d1 * d1) * v};
  };
  auto mul = [](const Jet& a, const Jet& b) {
    return Jet{a[0] * b[0], a[1] * b[0] + a[0] * b[1], a[2] * b[0] + 2 * a[1] * b[1] + a[0] * b[2]};
  };
  // r^2 P f for P = -Delta in the radial variable s.
  auto P = [n](const Jet& f) { return -(f[2] + (n - 2.0) * f[1]); };

  IbpReport rep;
  const auto& rule = numgrid::gauss_rule<8>();
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double a = breaks[b], c = breaks[b + 1];
    if (c <= a)
      continue;
    const int panels = std::max(4, int(std::ceil((c - a) / 0.01)));
    const double h = (c - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = a + (p + 0.5) * h;
      for (int i = 0; i < 8; ++i) {
        const double s = mid + 0.5 * h * rule.x[i];
        // dx = |S| r^n ds and each P carries 1/r^2.
        const double w = 0.5 * h * rule.w[i] * sphere_area(n) * std::exp((n - 2.0) * s);
        const Jet u = u_jet(s), v = v_jet(s, 1.0), v2 = v_jet(s, 2.0), vu = mul(v, u);
        rep.lhs += w * P(u) * u[0] * v2[0];
        rep.rhs += w * (P(vu) * vu[0] + 0.5 * u[0] * u[0] * P(v2) - P(v) * u[0] * u[0] * v[0]);
      }
    }
  }
  rep.relative_error = std::abs(rep.lhs - rep.rhs) / std::max(std::abs(rep.lhs), 1e-300);
  return rep;
}

// ---------------------------------------------------------------------------
// Minimal-growth decay ratios v / (v1^{1-beta} v2^beta)

struct DecayReport {
  std::vector<double> sups; ///< sup of the ratio over each probe set
  double sup_ratio = 0.0;   ///< sup over all sets
  bool bounded = false;     ///< sups stop growing as the probe sets expand
};

inline DecayReport decay_bound(const ScalarField& v, const ScalarField& v1, const ScalarField& v2,
                               double beta, std::span<const std::vector<Vec>> probe_sets)
{
  if (!(beta >= 0.5 && beta <= 1.0))
    throw std::invalid_argument("decay_bound: beta must lie in [1/2, 1]");
  DecayReport rep;
  for (const auto& set : probe_sets) {
    double sup = 0.0;
    for (const Vec& x : set) {
      const double lr = std::log(v.positive_at(x)) - (1.0 - beta) * std::log(v1.positive_at(x)) -
                        beta * std::log(v2.positive_at(x));
      sup = std::max(sup, std::exp(lr));
    }
    rep.sups.push_back(sup);
    rep.sup_ratio = std::max(rep.sup_ratio, sup);
  }
  rep.bounded = std::isfinite(rep.sup_ratio) &&
                (rep.sups.empty() || rep.sups.back() <= rep.sups.front() * (1.0 + 1e-12));
  return rep;
}

/// Nested radial probe sets on shells 1 <= |x| <= R_k along random directions.
inline std::vector<std::vector<Vec>> expanding_probes(int n, std::span<const double> R_list,
                                                      std::size_t per_set, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N01;
  std::vector<std::vector<Vec>> sets;
  for (double R : R_list) {
    std::uniform_real_distribution<double> S(0.0, std::log(R));
    std::vector<Vec> set;
    for (std::size_t i = 0; i < per_set; ++i) {
      Vec d(n);
      for (int j = 0; j < n; ++j)
        d[j] = N01(rng);
      set.push_back(std::exp(S(rng)) * d / d.norm());
    }
    Vec edge = Vec::Zero(n);
    edge[0] = 1.0;
    set.push_back(edge);
    sets.push_back(std::move(set));
  }
  return sets;
}

} // namespace hardy::agmon
