#pragma once

// Variational checks on radial reductions: Dirichlet eigenvalues of W^{-1}P on
// annuli, exterior sweeps, Rayleigh quotients and null-sequence probes.

#include "hardy/radial.hpp"

#include <algorithm>
#include <optional>

namespace hardy::varify {

using radial::GreenPair;

/// Piecewise-linear finite elements in s = log r with Dirichlet ends.
/// Quadratic form q(u) = int (u'^2 + V u^2) r^{n-1} dr = int (u_s^2 + r^2 V u^2) e^{(n-2)s} ds,
/// mass int W u^2 r^{n-1} dr = int W r^n u^2 ds.
struct AnnulusProblem {
  int n = 3;
  double r_lo = 0.0, r_hi = 0.0;
  std::size_t m = 0; ///< interior nodes
  double h = 0.0;    ///< step in s
  std::vector<double> s, r;
  std::vector<double> diag, off; ///< stiffness: off[i] couples nodes i and i+1
  std::vector<double> mass;      ///< lumped W mass

  /// Level span used by the closed-form Dirichlet correction.
  double level_span = 0.0;
};

inline AnnulusProblem assemble(int n, const RadialFn& V, const RadialFn& W, double r_lo,
                               double r_hi, std::size_t m)
{
  if (n < 1)
    throw std::invalid_argument("assemble: dimension must be positive");
  if (!(r_lo > 0.0 && r_hi > r_lo))
    throw std::invalid_argument("assemble: need 0 < r_lo < r_hi");
  if (m < 3)
    throw std::invalid_argument("assemble: need at least 3 interior nodes");
  AnnulusProblem p;
  p.n = n;
  p.r_lo = r_lo;
  p.r_hi = r_hi;
  p.m = m;
  const double s0 = std::log(r_lo), s1 = std::log(r_hi);
  p.h = (s1 - s0) / double(m + 1);
  const double h = p.h, k = n - 2.0;
  // Exact element integral of e^{(n-2)s} over [a, a+h], divided by h^2.
  auto elem = [&](double a) {
    if (k == 0.0)
      return 1.0 / h;
    return std::exp(k * a) * std::expm1(k * h) / (k * h * h);
  };
  p.s.resize(m);
  p.r.resize(m);
  p.diag.assign(m, 0.0);
  p.off.assign(m - 1, 0.0);
  p.mass.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    p.s[i] = s0 + double(i + 1) * h;
    p.r[i] = std::exp(p.s[i]);
  }
  for (std::size_t e = 0; e <= m; ++e) {
    const double a = s0 + double(e) * h;
    const double c = elem(a);
    if (e > 0)
      p.diag[e - 1] += c;
    if (e < m)
      p.diag[e] += c;
    if (e > 0 && e < m)
      p.off[e - 1] -= c;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double rn = std::exp(n * p.s[i]);
    if (V)
      p.diag[i] += h * V(p.r[i]) * rn;
    const double w = W(p.r[i]);
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::domain_error("assemble: weight is not positive at r = " + std::to_string(p.r[i]));
    p.mass[i] = h * w * rn;
  }
  p.level_span = std::abs(k) * (s1 - s0);
  return p;
}

/// Closed-form Dirichlet value 1 + 4 pi^2 / L^2 for an optimal weight on a level window of span L.
inline double dirichlet_prediction(double level_span)
{
  return 1.0 + 4.0 * pi * pi / (level_span * level_span);
}

/// Stiffness form u^T K u and mass form u^T M u for nodal values u.
inline double stiffness_form(const AnnulusProblem& p, const std::vector<double>& u)
{
  double q = 0.0;
  for (std::size_t i = 0; i < p.m; ++i) {
    q += p.diag[i] * u[i] * u[i];
    if (i + 1 < p.m)
      q += 2.0 * p.off[i] * u[i] * u[i + 1];
  }
  return q;
}

inline double mass_form(const AnnulusProblem& p, const std::vector<double>& u)
{
  double q = 0.0;
  for (std::size_t i = 0; i < p.m; ++i)
    q += p.mass[i] * u[i] * u[i];
  return q;
}

// ---------------------------------------------------------------------------
// Symmetric tridiagonal kernels

namespace detail {

// Extended precision keeps the residual of the scaled pencil below 1e-10 even
// when ||K|| / ||M|| ~ 1/h^2 is large.
using real = long double;
using rvec = std::vector<real>;

struct Tridiag {
  rvec d, e; ///< diagonal, off-diagonal
};

/// Solve (T - sigma I) x = b by LDL^T without pivoting.
inline rvec solve_shifted(const Tridiag& t, real sigma, rvec b)
{
  const std::size_t m = t.d.size();
  const real tiny = std::numeric_limits<real>::min();
  rvec piv(m), l(m, 0.0L);
  piv[0] = t.d[0] - sigma;
  for (std::size_t i = 1; i < m; ++i) {
    if (piv[i - 1] == 0.0L)
      piv[i - 1] = tiny;
    l[i] = t.e[i - 1] / piv[i - 1];
    piv[i] = t.d[i] - sigma - l[i] * t.e[i - 1];
  }
  if (piv[m - 1] == 0.0L)
    piv[m - 1] = tiny;
  for (std::size_t i = 1; i < m; ++i)
    b[i] -= l[i] * b[i - 1];
  for (std::size_t i = 0; i < m; ++i)
    b[i] /= piv[i];
  for (std::size_t i = m - 1; i-- > 0;)
    b[i] -= l[i + 1] * b[i + 1];
  return b;
}

/// Number of eigenvalues of T strictly below mu (Sturm count via LDL^T inertia).
inline std::size_t sturm_count(const Tridiag& t, real mu)
{
  std::size_t neg = 0;
  real q = t.d[0] - mu;
  for (std::size_t i = 0;;) {
    if (q == 0.0L)
      q = -std::numeric_limits<real>::epsilon() * (std::abs(mu) + 1.0L);
    if (q < 0.0L)
      ++neg;
    if (++i == t.d.size())
      break;
    q = t.d[i] - mu - t.e[i - 1] * t.e[i - 1] / q;
  }
  return neg;
}

inline rvec apply(const Tridiag& t, const rvec& x)
{
  const std::size_t m = t.d.size();
  rvec y(m);
  for (std::size_t i = 0; i < m; ++i) {
    real v = t.d[i] * x[i];
    if (i > 0)
      v += t.e[i - 1] * x[i - 1];
    if (i + 1 < m)
      v += t.e[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

inline real dot(const rvec& a, const rvec& b)
{
  real s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

inline void normalize(rvec& x)
{
  const real nx = std::sqrt(dot(x, x));
  for (real& v : x)
    v /= nx;
}

/// M^{-1/2} K M^{-1/2}.
inline Tridiag symmetric_form(const AnnulusProblem& p)
{
  Tridiag t;
  t.d.resize(p.m);
  t.e.resize(p.m - 1);
  for (std::size_t i = 0; i < p.m; ++i)
    t.d[i] = real(p.diag[i]) / real(p.mass[i]);
  for (std::size_t i = 0; i + 1 < p.m; ++i)
    t.e[i] = real(p.off[i]) / std::sqrt(real(p.mass[i]) * real(p.mass[i + 1]));
  return t;
}

/// ||(K - lambda M) v|| / ||M v|| for the stored (double) matrices.
inline double residual(const AnnulusProblem& p, real lambda, const rvec& v)
{
  real num = 0.0L, den = 0.0L;
  for (std::size_t i = 0; i < p.m; ++i) {
    real kv = real(p.diag[i]) * v[i];
    if (i > 0)
      kv += real(p.off[i - 1]) * v[i - 1];
    if (i + 1 < p.m)
      kv += real(p.off[i]) * v[i + 1];
    const real mv = real(p.mass[i]) * v[i];
    num += (kv - lambda * mv) * (kv - lambda * mv);
    den += mv * mv;
  }
  return double(std::sqrt(num / den));
}

} // namespace detail

struct SpectrumEstimate {
  double lambda0 = 0.0;
  double lambda_infinity = std::numeric_limits<double>::quiet_NaN();
  double residual = 0.0; ///< ||(K - lambda M) v|| / ||M v||
  int iterations = 0;
  bool degenerate = false; ///< a second eigenvalue within the tie tolerance
  double shift = 0.0;
  double prediction = std::numeric_limits<double>::quiet_NaN(); ///< 1 + 4 pi^2 / L^2
  std::vector<double> eigenvector; ///< nodal values v, max-normalized and positive
};

inline double generalized_residual(const AnnulusProblem& p, double lambda,
                                   const std::vector<double>& v)
{
  return detail::residual(p, lambda, detail::rvec(v.begin(), v.end()));
}

/// Smallest eigenvalue of K v = lambda M v by shifted inverse iteration
/// followed by Rayleigh quotient refinement.
inline SpectrumEstimate principal_eigenvalue(const AnnulusProblem& p, double tol = 1e-10,
                                             int max_iter = 2000)
{
  using detail::real;
  using detail::rvec;
  const auto t = detail::symmetric_form(p);
  const std::size_t m = p.m;
  real gersh = std::numeric_limits<real>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    real rad = 0.0L;
    if (i > 0)
      rad += std::abs(t.e[i - 1]);
    if (i + 1 < m)
      rad += std::abs(t.e[i]);
    gersh = std::min(gersh, t.d[i] - rad);
  }
  // 0.9 x the Gershgorin bound; a nonpositive bound is pushed further down instead.
  const real shift = gersh > 0.0L ? 0.9L * gersh : gersh - 0.1L * std::abs(gersh) - 1e-12L;
  SpectrumEstimate est;
  est.shift = double(shift);
  rvec x(m);
  for (std::size_t i = 0; i < m; ++i)
    x[i] = std::sin(pi * double(i + 1) / double(m + 1));
  detail::normalize(x);

  auto to_v = [&](const rvec& y) {
    rvec v(m);
    for (std::size_t i = 0; i < m; ++i)
      v[i] = y[i] / std::sqrt(real(p.mass[i]));
    return v;
  };

  real lambda = detail::dot(x, detail::apply(t, x));
  real prev = lambda;
  int it = 0;
  for (; it < max_iter; ++it) {
    x = detail::solve_shifted(t, shift, x);
    detail::normalize(x);
    lambda = detail::dot(x, detail::apply(t, x));
    if (std::abs(lambda - prev) <= 1e-7L * std::abs(lambda) && it > 2)
      break;
    prev = lambda;
  }
  // Rayleigh quotient refinement.
  double best_res = detail::residual(p, lambda, to_v(x));
  rvec best_x = x;
  real best_lambda = lambda;
  for (int k = 0; k < 8 && best_res > 0.01 * tol; ++k, ++it) {
    auto y = detail::solve_shifted(t, lambda, x);
    detail::normalize(y);
    if (!std::all_of(y.begin(), y.end(), [](real v) { return std::isfinite(double(v)); }))
      break;
    x = y;
    lambda = detail::dot(x, detail::apply(t, x));
    const double res = detail::residual(p, lambda, to_v(x));
    if (res < best_res) {
      best_res = res;
      best_x = x;
      best_lambda = lambda;
    }
  }
  est.lambda0 = double(best_lambda);
  est.residual = best_res;
  est.iterations = it;
  if (!(best_res <= tol))
    throw ConvergenceError("principal_eigenvalue: no convergence, residual " +
                             format_sci(best_res) + " at lambda " + format_sci(est.lambda0),
                           best_res);
  const real tie = 1e-8L * std::max(1.0L, std::abs(best_lambda));
  if (detail::sturm_count(t, best_lambda - tie) != 0)
    throw ConvergenceError("principal_eigenvalue: converged to a non-principal eigenvalue",
                           best_res);
  est.degenerate = detail::sturm_count(t, best_lambda + tie) >= 2;
  const rvec v = to_v(best_x);
  real vmax = 0.0L;
  for (real a : v)
    if (std::abs(a) > std::abs(vmax))
      vmax = a;
  est.eigenvector.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    est.eigenvector[i] = double(v[i] / vmax);
  if (p.level_span > 0.0)
    est.prediction = dirichlet_prediction(p.level_span);
  return est;
}

// ---------------------------------------------------------------------------
// Exterior sweeps

struct SweepResult {
  std::vector<double> R;
  std::vector<double> lambda;
  double plateau = 0.0;    ///< mean of the sweep values
  double drift = 0.0;      ///< (max - min) / plateau
  double decade_ratio = 1.0; ///< geometric mean growth factor of lambda per decade of R
  SpectrumEstimate estimate;
};

/// lambda_0 on the exterior annuli (R, R window) for each R in R_list.
inline SweepResult lambda_infinity_sweep(int n, const RadialFn& V, const RadialFn& W,
                                         const std::vector<double>& R_list, double window,
                                         std::size_t m = 2000)
{
  if (R_list.empty())
    throw std::invalid_argument("lambda_infinity_sweep: empty radius list");
  if (!(window > 1.0))
    throw std::invalid_argument("lambda_infinity_sweep: window must exceed 1");
  for (std::size_t i = 1; i < R_list.size(); ++i)
    if (!(R_list[i] > R_list[i - 1]))
      throw std::invalid_argument("lambda_infinity_sweep: radii must be increasing");
  SweepResult res;
  res.R = R_list;
  for (double R : R_list) {
    auto est = principal_eigenvalue(assemble(n, V, W, R, R * window, m));
    res.lambda.push_back(est.lambda0);
    res.estimate = est;
  }
  double lo = res.lambda.front(), hi = lo, sum = 0.0;
  for (double l : res.lambda) {
    lo = std::min(lo, l);
    hi = std::max(hi, l);
    sum += l;
  }
  res.plateau = sum / double(res.lambda.size());
  res.drift = (hi - lo) / res.plateau;
  if (R_list.size() >= 2) {
    const double decades = std::log10(R_list.back() / R_list.front());
    res.decade_ratio = std::pow(res.lambda.back() / res.lambda.front(), 1.0 / decades);
  }
  res.estimate.lambda0 = res.lambda.front();
  res.estimate.lambda_infinity = res.plateau;
  return res;
}

// ---------------------------------------------------------------------------
// Rayleigh quotients

/// Radial test function with derivative d/dr.
struct RadialTest {
  RadialFn f, df;
};

/// q(phi) / int W phi^2 over [r1, r2], Gauss-Legendre in s with the given breakpoints.
inline double rayleigh_quotient(const RadialTest& phi, int n, const RadialFn& V, const RadialFn& W,
                                double r1, double r2, std::vector<double> breaks = {},
                                double panel = 0.005)
{
  if (!(r1 > 0.0 && r2 > r1))
    throw std::invalid_argument("rayleigh_quotient: need 0 < r1 < r2");
  breaks.push_back(r1);
  breaks.push_back(r2);
  std::sort(breaks.begin(), breaks.end());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = std::log(std::clamp(breaks[i], r1, r2));
    const double b = std::log(std::clamp(breaks[i + 1], r1, r2));
    if (b <= a)
      continue;
    const int panels = std::max(4, int(std::ceil((b - a) / panel)));
    num += numgrid::integrate_gauss<8>(
      [&](double s) {
        const double r = std::exp(s), f = phi.f(r), d = phi.df(r);
        return (d * d + (V ? V(r) : 0.0) * f * f) * std::exp(n * s);
      },
      a, b, panels);
    den += numgrid::integrate_gauss<8>(
      [&](double s) {
        const double r = std::exp(s), f = phi.f(r);
        return W(r) * f * f * std::exp(n * s);
      },
      a, b, panels);
  }
  if (!(den > 0.0))
    throw std::domain_error("rayleigh_quotient: zero denominator");
  return num / den;
}

/// Cutoff profile: 1 on |x| <= plateau, linear ramps of the given width, 0 beyond.
struct Trapezoid {
  double plateau = 0.0, ramp = 1.0;
  double operator()(double x) const
  {
    const double a = std::abs(x);
    if (a <= plateau)
      return 1.0;
    if (a >= plateau + ramp)
      return 0.0;
    return (plateau + ramp - a) / ramp;
  }
  double slope(double x) const
  {
    const double a = std::abs(x);
    if (a <= plateau || a >= plateau + ramp)
      return 0.0;
    return x > 0 ? -1.0 / ramp : 1.0 / ramp;
  }
  /// 4 int chi'^2 / int chi^2
  double quotient_excess() const
  {
    const double num = 2.0 / ramp, den = 2.0 * plateau + 2.0 * ramp / 3.0;
    return 4.0 * num / den;
  }
  double square_integral() const { return 2.0 * plateau + 2.0 * ramp / 3.0; }
};

/// phi = sqrt(u G) chi(log(G/u) - center) for a cutoff chi.
inline RadialTest ground_state_cutoff(const GreenPair& p, Trapezoid chi, double center)
{
  RadialTest t;
  t.f = [p, chi, center](double r) {
    return std::exp(0.5 * p.log_uG(r)) * chi(p.level(r) - center);
  };
  t.df = [p, chi, center](double r) {
    const double L = p.level(r) - center;
    const double g = std::exp(0.5 * p.log_uG(r));
    return g * (0.5 * (p.dlog_u(r) + p.dlog_G(r)) * chi(L) + chi.slope(L) * p.dlevel(r));
  };
  return t;
}

/// Radii where the cutoff profile has kinks.
inline std::vector<double> cutoff_breaks(const GreenPair& p, const Trapezoid& chi, double center)
{
  std::vector<double> b;
  for (double L : {-chi.plateau - chi.ramp, -chi.plateau, chi.plateau, chi.plateau + chi.ramp})
    b.push_back(p.r_at_level(center + L));
  std::sort(b.begin(), b.end());
  return b;
}

/// Tent of half-width ell centered at the level of r = 1; closed form 1 + 12/ell^2.
inline double tent_quotient(const GreenPair& p, const RadialFn& V, double ell)
{
  Trapezoid chi{0.0, ell};
  const double c = p.level(1.0);
  auto br = cutoff_breaks(p, chi, c);
  return rayleigh_quotient(ground_state_cutoff(p, chi, c), p.n, V,
                           [&p](double r) { return p.weight(r); }, br.front(), br.back(), br);
}

struct NullSequenceEntry {
  double k = 0.0;
  double quotient = 0.0;
  double mass = 0.0;         ///< W-mass of phi_k^2 (whole cutoff)
  double plateau_mass = 0.0; ///< W-mass over the plateau |L| <= k
};

struct NullSequenceReport {
  std::vector<NullSequenceEntry> entries;
  numgrid::LinearFit quotient_fit; ///< quotient against 1/k^2
  numgrid::LinearFit mass_fit;     ///< whole mass against k
  numgrid::LinearFit plateau_fit;  ///< plateau mass against k
};

/// Ground-state cutoffs chi_k: plateau |L| <= k, ramps of width k (L the centered level).
/// With cap set, the cutoff stops widening at k = cap (control case).
inline NullSequenceReport null_sequence_probe(const GreenPair& p, const RadialFn& V,
                                              const std::vector<double>& k_list,
                                              std::optional<double> cap = std::nullopt)
{
  if (k_list.size() < 2)
    throw std::invalid_argument("null_sequence_probe: need at least two widths");
  NullSequenceReport rep;
  const double c = p.level(1.0);
  RadialFn W = [&p](double r) { return p.weight(r); };
  std::vector<double> inv2, q, ks, mass, pm;
  for (double k : k_list) {
    const double kk = cap ? std::min(k, *cap) : k;
    Trapezoid chi{kk, kk};
    auto br = cutoff_breaks(p, chi, c);
    NullSequenceEntry e;
    e.k = k;
    e.quotient = rayleigh_quotient(ground_state_cutoff(p, chi, c), p.n, V, W, br.front(),
                                   br.back(), br);
    auto phi = ground_state_cutoff(p, chi, c);
    e.mass = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i)
      e.mass += p.radial_integral(
        [&](double r) {
          const double f = phi.f(r);
          return W(r) * f * f;
        },
        br[i], br[i + 1]);
    e.plateau_mass = radial::level_mass(p, c - kk, c + kk);
    rep.entries.push_back(e);
    inv2.push_back(1.0 / (k * k));
    q.push_back(e.quotient);
    ks.push_back(k);
    mass.push_back(e.mass);
    pm.push_back(e.plateau_mass);
  }
  rep.quotient_fit = numgrid::linear_fit(inv2, q);
  rep.mass_fit = numgrid::linear_fit(ks, mass);
  rep.plateau_fit = numgrid::linear_fit(ks, pm);
  return rep;
}

struct NullCriticalityReport {
  std::vector<double> levels; ///< a values (levels of G/u)
  std::vector<double> masses; ///< int_{a <= G/u <= 1} uGW
  double slope = 0.0;         ///< against log(1/a)
  double r2 = 0.0;
};

inline NullCriticalityReport null_criticality_probe(const GreenPair& p,
                                                    const std::vector<double>& a_list)
{
  if (a_list.size() < 2)
    throw std::invalid_argument("null_criticality_probe: need at least two levels");
  NullCriticalityReport rep;
  std::vector<double> x;
  for (double a : a_list) {
    if (!(a > 0.0 && a <= 1.0))
      throw std::invalid_argument("null_criticality_probe: levels must lie in (0, 1]");
    rep.levels.push_back(a);
    rep.masses.push_back(radial::level_mass(p, std::log(a), 0.0));
    x.push_back(-std::log(a));
  }
  auto fit = numgrid::linear_fit(x, rep.masses);
  rep.slope = fit.slope;
  rep.r2 = fit.r2;
  return rep;
}

struct AverageDomination {
  double lhs = 0.0;          ///< int_{a <= log(G/u) <= b} uGV
  double rhs = 0.0;          ///< 5 int_{a-1 <= log(G/u) <= b+1} uGW, by quadrature
  double rhs_closed = 0.0;   ///< (5/4)(b - a + 2)
  double rhs_printed = 0.0;  ///< (5/4)(log(b+1) - log(a-1)), the printed form
  double ratio = 0.0;        ///< lhs / rhs
  bool holds = false;
  bool holds_printed = false;
};

/// Level-band average of V against the widened band of W.
inline AverageDomination average_domination_check(const GreenPair& p, const RadialFn& V, double a,
                                                  double b)
{
  if (!(a > 1.0))
    throw std::invalid_argument("average_domination_check: need a > 1");
  if (!(b > a))
    throw std::invalid_argument("average_domination_check: need a < b");
  AverageDomination d;
  d.lhs = V ? radial::level_integral(p, V, a, b) : 0.0;
  d.rhs = 5.0 * radial::level_mass(p, a - 1.0, b + 1.0);
  d.rhs_closed = 1.25 * (b - a + 2.0);
  d.rhs_printed = 1.25 * (std::log(b + 1.0) - std::log(a - 1.0));
  d.ratio = d.lhs / d.rhs;
  d.holds = d.lhs <= d.rhs + 1e-9;
  d.holds_printed = d.lhs <= d.rhs_printed + 1e-9;
  return d;
}

} // namespace hardy::varify
