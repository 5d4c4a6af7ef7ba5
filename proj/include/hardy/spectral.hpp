#pragma once

// Spectral representation of W^{-1}P on radial fields: Mellin transform,
// generalized Fourier transform over the modes u (G/u)^{1/2 + i xi}, and the
// identities that make it unitary.

#include "hardy/radial.hpp"

#include <complex>
#include <random>

namespace hardy::spectral {

using cplx = std::complex<double>;
using radial::GreenPair;

inline std::vector<double> xi_grid(std::size_t count = 512, double lo = -8.0, double hi = 8.0)
{
  if (count < 2 || !(hi > lo))
    throw std::invalid_argument("xi_grid: need at least two points on a nonempty interval");
  std::vector<double> xi(count);
  for (std::size_t i = 0; i < count; ++i)
    xi[i] = lo + (hi - lo) * double(i) / double(count - 1);
  return xi;
}

/// Trapezoid rule on a uniform abscissa.
template <class T>
T trapezoid(const std::vector<T>& y, double step)
{
  T s = T(0);
  for (std::size_t i = 0; i < y.size(); ++i)
    s += (i == 0 || i + 1 == y.size() ? 0.5 : 1.0) * y[i];
  return s * step;
}

// ---------------------------------------------------------------------------
// Mellin transform

struct MellinResult {
  std::vector<double> xi;
  std::vector<cplx> values;
  double tail_fraction = 0.0; ///< estimated mass outside the grid relative to the total
};

inline constexpr double mellin_tail_tolerance = 1e-8;

/// Mf(xi) = (2 pi)^{-1/2} int f(r) r^{i xi - 1/2} dr, trapezoid in s = log r.
inline MellinResult mellin_transform(const numgrid::SampledFunction& f,
                                     const std::vector<double>& xi)
{
  const auto& g = f.grid();
  const std::size_t m = g.size();
  std::vector<double> a(m);
  double total = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    a[k] = f[k] * std::exp(0.5 * g.s(k));
    total += std::abs(a[k]) * g.step();
  }
  // Exponential extrapolation of |a| beyond each end.
  auto tail = [&](std::size_t e, std::size_t in) {
    const double ae = std::abs(a[e]), ai = std::abs(a[in]);
    if (ae == 0.0)
      return 0.0;
    if (ai <= ae)
      return std::numeric_limits<double>::infinity();
    const double rate = std::log(ai / ae) / g.step();
    return ae / rate;
  };
  MellinResult res;
  res.xi = xi;
  res.tail_fraction = total > 0.0 ? (tail(0, 1) + tail(m - 1, m - 2)) / total : 0.0;
  if (!(res.tail_fraction < mellin_tail_tolerance))
    throw std::domain_error("mellin_transform: insufficient decay at the grid ends (tail fraction " +
                            format_sci(res.tail_fraction) + "); extend the grid");
  const double c = 1.0 / std::sqrt(2.0 * pi);
  res.values.resize(xi.size());
  for (std::size_t j = 0; j < xi.size(); ++j) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double w = (k == 0 || k + 1 == m) ? 0.5 : 1.0;
      s += w * a[k] * std::polar(1.0, xi[j] * g.s(k));
    }
    res.values[j] = c * g.step() * s;
  }
  return res;
}

/// int |Mf|^2 d xi on the transform grid.
inline double l2_norm_sq(const MellinResult& m)
{
  std::vector<double> y(m.values.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = std::norm(m.values[i]);
  return trapezoid(y, m.xi[1] - m.xi[0]);
}

// ---------------------------------------------------------------------------
// Modes and the radial spectral map

/// phi_xi = u (G/u)^{1/2} e^{i xi log(G/u)}, solving (P - (1 + 4 xi^2) W) phi = 0.
struct ModeFunction {
  double xi = 0.0;
  const GreenPair* pair = nullptr;

  double amplitude(double r) const { return std::exp(pair->log_u(r) + 0.5 * pair->level(r)); }
  double phase(double r) const { return xi * pair->level(r); }
  cplx operator()(double r) const { return std::polar(amplitude(r), phase(r)); }
  double eigenvalue() const { return 1.0 + 4.0 * xi * xi; }
};

/// Radial field f(r) with its support [r_lo, r_hi].
struct RadialField {
  RadialFn f;
  double r_lo = 0.0, r_hi = 0.0;
};

/// Quadrature nodes in s over [r_lo, r_hi] with weights for |S^{n-1}| r^n ds.
struct RadialNodes {
  std::vector<double> r, w;
};

inline RadialNodes radial_nodes(const GreenPair& p, double r_lo, double r_hi, double panel = 0.01)
{
  if (!(r_lo > 0.0 && r_hi > r_lo))
    throw std::invalid_argument("radial_nodes: need 0 < r_lo < r_hi");
  if (r_lo < p.r_min * (1.0 - 1e-12) || r_hi > p.r_max * (1.0 + 1e-12))
    throw std::out_of_range("support escapes the grid of the pair");
  const auto& rule = numgrid::gauss_rule<8>();
  const double s1 = std::log(r_lo), s2 = std::log(r_hi);
  const int panels = std::max(16, int(std::ceil((s2 - s1) / panel)));
  const double width = (s2 - s1) / panels, area = sphere_area(p.n);
  RadialNodes q;
  q.r.reserve(8 * panels);
  q.w.reserve(8 * panels);
  for (int k = 0; k < panels; ++k) {
    const double mid = s1 + (k + 0.5) * width;
    for (int i = 0; i < 8; ++i) {
      const double s = mid + 0.5 * width * rule.x[i];
      q.r.push_back(std::exp(s));
      q.w.push_back(0.5 * width * rule.w[i] * area * std::exp(p.n * s));
    }
  }
  return q;
}

/// int |f|^2 W dnu
inline double weighted_norm_sq(const GreenPair& p, const RadialField& f)
{
  const auto q = radial_nodes(p, f.r_lo, f.r_hi);
  double s = 0.0;
  for (std::size_t i = 0; i < q.r.size(); ++i) {
    const double v = f.f(q.r[i]);
    s += q.w[i] * v * v * p.weight(q.r[i]);
  }
  return s;
}

struct FourierResult {
  std::vector<double> xi;
  std::vector<cplx> values;
};

/// Ff(xi) = sqrt(2/pi) int f conj(phi_xi) W dnu by radial quadrature.
inline FourierResult generalized_fourier(const GreenPair& p, const RadialField& f,
                                         const std::vector<double>& xi)
{
  const auto q = radial_nodes(p, f.r_lo, f.r_hi);
  const std::size_t m = q.r.size();
  std::vector<double> amp(m), L(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double r = q.r[i];
    L[i] = p.level(r);
    amp[i] = q.w[i] * f.f(r) * p.weight(r) * std::exp(p.log_u(r) + 0.5 * L[i]);
  }
  FourierResult res;
  res.xi = xi;
  res.values.resize(xi.size());
  const double c = std::sqrt(2.0 / pi);
  for (std::size_t j = 0; j < xi.size(); ++j) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      s += amp[i] * std::polar(1.0, -xi[j] * L[i]);
    res.values[j] = c * s;
  }
  return res;
}

/// f(r) = sqrt(2/pi) int Ff(xi) phi_xi(r) d xi on the transform grid.
inline double inverse_fourier(const GreenPair& p, const FourierResult& F, double r)
{
  const double L = p.level(r), a = std::exp(p.log_u(r) + 0.5 * L);
  std::vector<double> y(F.xi.size());
  for (std::size_t j = 0; j < y.size(); ++j)
    y[j] = (F.values[j] * std::polar(1.0, F.xi[j] * L)).real();
  return std::sqrt(2.0 / pi) * a * trapezoid(y, F.xi[1] - F.xi[0]);
}

inline double l2_norm_sq(const FourierResult& F)
{
  std::vector<double> y(F.values.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = std::norm(F.values[i]);
  return trapezoid(y, F.xi[1] - F.xi[0]);
}

// ---------------------------------------------------------------------------
// Seeded test family

/// u (G/u)^{1/2} e^{-(L-c)^2 / (2 sigma^2)} cos(omega (L - c)), cut off at |L - c| = 9 sigma.
struct LevelBump {
  double center = 0.0, sigma = 1.0, omega = 0.0;

  double profile(double L) const
  {
    const double x = (L - center) / sigma;
    if (std::abs(x) >= 9.0)
      return 0.0;
    return std::exp(-0.5 * x * x) * std::cos(omega * (L - center));
  }
  RadialField field(const GreenPair& p) const
  {
    RadialField f;
    const LevelBump b = *this;
    f.f = [b, p](double r) {
      const double L = p.level(r);
      return std::exp(p.log_u(r) + 0.5 * L) * b.profile(L);
    };
    const auto [lo, hi] = p.shell(center - 9.0 * sigma, center + 9.0 * sigma);
    f.r_lo = lo;
    f.r_hi = hi;
    return f;
  }
};

inline std::vector<LevelBump> bump_family(const GreenPair& p, std::size_t count,
                                          std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> C(-2.0, 2.0), S(0.75, 1.25), W(0.0, 2.0);
  const double c0 = p.level(1.0);
  std::vector<LevelBump> out;
  for (std::size_t i = 0; i < count; ++i) {
    LevelBump b;
    b.center = c0 + C(rng);
    b.sigma = S(rng);
    b.omega = W(rng);
    out.push_back(b);
  }
  return out;
}

struct UnitarityReport {
  double plancherel_error = 0.0; ///< | ||Ff||^2 - ||f||_W^2 | / ||f||_W^2
  double inversion_error = 0.0;  ///< max |f - F^{-1}Ff| / max |f| at probe radii
};

inline UnitarityReport unitarity_check(const GreenPair& p, const RadialField& f,
                                       const std::vector<double>& xi, std::size_t probes,
                                       std::uint64_t seed)
{
  UnitarityReport rep;
  const auto F = generalized_fourier(p, f, xi);
  const double n2 = weighted_norm_sq(p, f);
  rep.plancherel_error = std::abs(l2_norm_sq(F) - n2) / n2;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(std::log(f.r_lo), std::log(f.r_hi));
  double fmax = 0.0, emax = 0.0;
  for (std::size_t i = 0; i < probes; ++i) {
    const double r = std::exp(U(rng));
    const double v = f.f(r);
    fmax = std::max(fmax, std::abs(v));
    emax = std::max(emax, std::abs(inverse_fourier(p, F, r) - v));
  }
  rep.inversion_error = fmax > 0.0 ? emax / fmax : emax;
  return rep;
}

// ---------------------------------------------------------------------------
// Conjugation identity (1/W) P(u f(G/u)) = -4 u f''(G/u) (G/u)^2

/// Function of t > 0 with its second derivative.
struct TFunction {
  std::function<double(double)> f, d2f;
  std::string label;
};

inline TFunction power_t(double alpha)
{
  return {[alpha](double t) { return std::pow(t, alpha); },
          [alpha](double t) { return alpha * (alpha - 1.0) * std::pow(t, alpha - 2.0); },
          "t^" + format_sci(alpha)};
}

/// sqrt(t) cos(xi log t), eigen-relation constant 1 + 4 xi^2.
inline TFunction oscillating_t(double xi)
{
  return {[xi](double t) { return std::sqrt(t) * std::cos(xi * std::log(t)); },
          [xi](double t) {
            const double y = std::log(t);
            return std::pow(t, -1.5) *
                   ((-0.25 - xi * xi) * std::cos(xi * y));
          },
          "sqrt(t) cos(" + format_sci(xi) + " log t)"};
}

/// p(log t) for a cubic p with coefficients c[0] + c[1] y + c[2] y^2 + c[3] y^3.
inline TFunction log_cubic_t(std::array<double, 4> c)
{
  auto p1 = [c](double y) { return c[1] + 2 * c[2] * y + 3 * c[3] * y * y; };
  auto p2 = [c](double y) { return 2 * c[2] + 6 * c[3] * y; };
  return {[c](double t) {
            const double y = std::log(t);
            return c[0] + y * (c[1] + y * (c[2] + y * c[3]));
          },
          [p1, p2](double t) {
            const double y = std::log(t);
            return (p2(y) - p1(y)) / (t * t);
          },
          "cubic in log t"};
}

struct ConjugationReport {
  double residual = 0.0;     ///< max |lhs - rhs| / (|u f| + |rhs|)
  double max_eigen_gap = 0.0; ///< max |lhs / (u f) - lambda| when lambda is given
};

/// -Delta w + V w divided by W, with w(s) differentiated by a 5-point stencil in s.
inline double conjugated_operator(const GreenPair& p, const std::function<double(double)>& w,
                                  double r, double h = 1e-3)
{
  const double s = std::log(r);
  const double f2 = w(std::exp(s + 2 * h)), f1 = w(std::exp(s + h)), f0 = w(r),
               g1 = w(std::exp(s - h)), g2 = w(std::exp(s - 2 * h));
  const double ds = (-f2 + 8 * f1 - 8 * g1 + g2) / (12 * h);
  const double dss = (-f2 + 16 * f1 - 30 * f0 + 16 * g1 - g2) / (12 * h * h);
  const double lap = (dss + (p.n - 2.0) * ds) / (r * r);
  return (-lap + p.potential(r) * f0) / p.weight(r);
}

inline ConjugationReport conjugation_check(const TFunction& f, const GreenPair& p,
                                           const std::vector<double>& radii,
                                           std::optional<double> lambda = std::nullopt)
{
  ConjugationReport rep;
  auto w = [&](double r) { return std::exp(p.log_u(r)) * f.f(std::exp(p.level(r))); };
  for (double r : radii) {
    const double t = std::exp(p.level(r)), u = std::exp(p.log_u(r));
    const double lhs = conjugated_operator(p, w, r);
    const double rhs = -4.0 * u * f.d2f(t) * t * t;
    const double base = u * f.f(t);
    rep.residual = std::max(rep.residual, std::abs(lhs - rhs) / (std::abs(base) + std::abs(rhs)));
    if (lambda && std::abs(base) > 1e-3 * std::abs(rhs))
      rep.max_eigen_gap = std::max(rep.max_eigen_gap, std::abs(lhs / base - *lambda));
  }
  return rep;
}

inline std::vector<double> probe_radii(double lo = 1e-3, double hi = 1e3, std::size_t count = 41)
{
  std::vector<double> r(count);
  for (std::size_t i = 0; i < count; ++i)
    r[i] = lo * std::pow(hi / lo, double(i) / double(count - 1));
  return r;
}

/// Relative gap between F[(1/W) P f] and (1 + 4 xi^2) F[f] on the transform grid.
inline double multiplier_check(const GreenPair& p, const LevelBump& b,
                               const std::vector<double>& xi)
{
  const auto f = b.field(p);
  RadialField pf;
  pf.r_lo = f.r_lo;
  pf.r_hi = f.r_hi;
  pf.f = [&](double r) { return conjugated_operator(p, f.f, r); };
  const auto F = generalized_fourier(p, f, xi);
  const auto G = generalized_fourier(p, pf, xi);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < xi.size(); ++j) {
    num = std::max(num, std::abs(G.values[j] - (1.0 + 4.0 * xi[j] * xi[j]) * F.values[j]));
    den = std::max(den, std::abs(G.values[j]));
  }
  return num / den;
}

// ---------------------------------------------------------------------------
// Torus orthonormality and coarea

/// (2 / (pi rho)) int_{|log(G/u)| < rho pi} phi_k conj(phi_l) W dnu with xi_k = k / rho.
inline cplx torus_orthonormality(const GreenPair& p, double rho, int k, int l)
{
  if (!(rho > 0.0))
    throw std::invalid_argument("torus_orthonormality: radius must be positive");
  const double Lmax = rho * pi;
  const auto [r_lo, r_hi] = p.shell(-Lmax, Lmax);
  const auto q = radial_nodes(p, r_lo, r_hi, 0.002);
  const double dxi = double(k - l) / rho;
  cplx s = 0.0;
  for (std::size_t i = 0; i < q.r.size(); ++i) {
    const double r = q.r[i];
    s += q.w[i] * std::exp(p.log_uG(r)) * p.weight(r) * std::polar(1.0, dxi * p.level(r));
  }
  return 2.0 / (pi * rho) * s;
}

struct Coarea {
  double lhs = 0.0, rhs = 0.0;
};

/// int_{a <= G/u <= b} u G W dnu against (1/4) log(b/a).
inline Coarea coarea_identity(const GreenPair& p, double a, double b)
{
  if (!(a > 0.0 && b > 0.0))
    throw std::invalid_argument("coarea_identity: levels must be positive");
  if (a > b)
    throw std::invalid_argument("coarea_identity: need a <= b");
  Coarea c;
  c.rhs = 0.25 * std::log(b / a);
  c.lhs = radial::level_mass(p, std::log(a), std::log(b));
  return c;
}

// ---------------------------------------------------------------------------
// Isometry chain: u F(G/u) -> (1/2) F(1/tau) -> Mellin

struct ChainReport {
  double weighted_norm = 0.0; ///< ||u F(G/u)||^2 in L^2(W dnu)
  double t_norm = 0.0;        ///< int F^2 dt / (4 t^2)
  double mellin_norm = 0.0;   ///< ||M g||^2 with g(tau) = F(1/tau) / 2
  double error = 0.0;         ///< max relative disagreement
};

inline ChainReport isometry_chain(const GreenPair& p, const LevelBump& b,
                                  const std::vector<double>& xi)
{
  ChainReport c;
  const auto field = b.field(p);
  c.weighted_norm = weighted_norm_sq(p, field);
  // F(t) = sqrt(t) profile(log t), so F^2 / (4 t^2) dt = profile^2 e^{-L} / 4 dL.
  const double L1 = b.center - 9.0 * b.sigma, L2 = b.center + 9.0 * b.sigma;
  c.t_norm = numgrid::integrate_gauss<8>(
    [&](double L) {
      const double F = std::exp(0.5 * L) * b.profile(L);
      return 0.25 * F * F * std::exp(-L);
    },
    L1, L2, 2000);
  // g(tau) = F(1/tau) / 2 sampled on a log grid in tau wide enough for the Mellin tail check.
  auto grid = numgrid::make_log_grid(std::exp(-L2 - 2.0), std::exp(-L1 + 2.0), 4001);
  auto g = numgrid::SampledFunction::sample(grid, [&](double tau) {
    const double L = -std::log(tau);
    return 0.5 * std::exp(0.5 * L) * b.profile(L);
  });
  c.mellin_norm = l2_norm_sq(mellin_transform(g, xi));
  c.error = std::max(std::abs(c.t_norm - c.weighted_norm), std::abs(c.mellin_norm - c.weighted_norm)) /
            c.weighted_norm;
  return c;
}

} // namespace hardy::spectral
