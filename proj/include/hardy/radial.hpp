#pragma once

// Radial engine for -Delta + V(|x|) in R^n.
//
// Profiles are stored in log form: log v, its s-derivative and, when known,
// its second s-derivative (s = log r). Solutions such as sinh(r)/r overflow a
// double long before r = 1e6; their logarithms do not.

#include "hardy/construct.hpp"
#include "hardy/numgrid.hpp"

#include <optional>

namespace hardy::radial {

using numgrid::GridPtr;
using numgrid::LogGrid;
using numgrid::SampledFunction;

struct RadialOperator {
  int n = 3;
  RadialFn V; ///< empty means V = 0
  GridPtr grid;
  std::string label = "radial operator";

  double potential(double r) const { return V ? V(r) : 0.0; }
};

inline RadialOperator make_operator(int n, RadialFn V, GridPtr grid,
                                    std::string label = "radial operator")
{
  if (n < 2)
    throw std::invalid_argument("dimension must be >= 2");
  if (!grid)
    throw std::invalid_argument("radial operator needs a grid");
  RadialOperator op{n, std::move(V), std::move(grid), std::move(label)};
  for (std::size_t k = 0; k < op.grid->size(); ++k)
    if (!std::isfinite(op.potential(op.grid->t(k))))
      throw std::invalid_argument("potential is not finite at r = " +
                                  std::to_string(op.grid->t(k)));
  return op;
}

inline GridPtr default_grid() { return numgrid::make_log_grid(1e-6, 1e6, 8001); }

// ---------------------------------------------------------------------------

namespace detail {

/// Quintic Hermite value and first derivative on [0, h].
inline std::pair<double, double> quintic(double y0, double y1, double d0, double d1,
                                         double c0, double c1, double h, double x)
{
  const double u = x / h, u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
  const double h00 = 1 - 10 * u3 + 15 * u4 - 6 * u5;
  const double h10 = u - 6 * u3 + 8 * u4 - 3 * u5;
  const double h20 = 0.5 * u2 - 1.5 * u3 + 1.5 * u4 - 0.5 * u5;
  const double h21 = 0.5 * u3 - u4 + 0.5 * u5;
  const double h11 = -4 * u3 + 7 * u4 - 3 * u5;
  const double h01 = 10 * u3 - 15 * u4 + 6 * u5;
  const double g00 = -30 * u2 + 60 * u3 - 30 * u4;
  const double g10 = 1 - 18 * u2 + 32 * u3 - 15 * u4;
  const double g20 = u - 4.5 * u2 + 6 * u3 - 2.5 * u4;
  const double g21 = 1.5 * u2 - 4 * u3 + 2.5 * u4;
  const double g11 = -12 * u2 + 28 * u3 - 15 * u4;
  const double g01 = 30 * u2 - 60 * u3 + 30 * u4;
  const double v = h00 * y0 + h10 * h * d0 + h20 * h * h * c0 + h21 * h * h * c1 +
                   h11 * h * d1 + h01 * y1;
  const double dv = (g00 * y0 + g01 * y1) / h + g10 * d0 + g11 * d1 + h * (g20 * c0 + g21 * c1);
  return {v, dv};
}

inline double log_sum_exp(double a, double b)
{
  if (a == -std::numeric_limits<double>::infinity())
    return b;
  if (b == -std::numeric_limits<double>::infinity())
    return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

} // namespace detail

/// Positive radial function sampled in log form on a LogGrid.
class RadialProfile {
public:
  RadialProfile() = default;

  /// log_values: log v at nodes; slopes: d log v / ds; curvature (optional): d^2 log v / ds^2.
  RadialProfile(GridPtr grid, std::vector<double> log_values, std::vector<double> slopes,
                std::vector<double> curvature = {})
    : grid_(std::move(grid)), log_(std::move(log_values)), slope_(std::move(slopes)),
      curv_(std::move(curvature))
  {
    if (!grid_ || log_.size() != grid_->size() || slope_.size() != grid_->size() ||
        (!curv_.empty() && curv_.size() != grid_->size()))
      throw std::invalid_argument("RadialProfile: sample counts do not match the grid");
    for (std::size_t k = 0; k < log_.size(); ++k)
      if (!std::isfinite(log_[k]) || !std::isfinite(slope_[k]) ||
          (!curv_.empty() && !std::isfinite(curv_[k])))
        throw std::invalid_argument("RadialProfile: non-finite sample at node " +
                                    std::to_string(k));
  }

  /// Profile from closed-form log v(r) and d log v / dr.
  static RadialProfile closed_form(GridPtr grid, const RadialFn& log_v, const RadialFn& dlog_v)
  {
    std::vector<double> l(grid->size()), d(grid->size());
    for (std::size_t k = 0; k < l.size(); ++k) {
      const double r = grid->t(k);
      l[k] = log_v(r);
      d[k] = r * dlog_v(r);
    }
    return RadialProfile(std::move(grid), std::move(l), std::move(d));
  }

  const LogGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return log_.size(); }

  double log_at(std::size_t k) const { return log_[k]; }
  double slope_at(std::size_t k) const { return slope_[k]; }
  double value_at(std::size_t k) const { return std::exp(log_[k]); }
  /// d log v / dr at node k.
  double dlog_at(std::size_t k) const { return slope_[k] / grid_->t(k); }
  const std::vector<double>& log_values() const { return log_; }
  const std::vector<double>& slopes() const { return slope_; }

  /// log v and d log v / ds at r (Hermite interpolation in s).
  std::pair<double, double> eval_s(double r) const
  {
    numgrid::require_inside(*grid_, r, "RadialProfile");
    const double s = std::clamp(std::log(r), grid_->s_min(), grid_->s_max());
    const std::size_t k = grid_->cell_of_s(s);
    const double h = grid_->step(), x = s - grid_->s(k);
    if (!curv_.empty())
      return detail::quintic(log_[k], log_[k + 1], slope_[k], slope_[k + 1], curv_[k],
                             curv_[k + 1], h, x);
    return {numgrid::hermite(log_[k], log_[k + 1], slope_[k], slope_[k + 1], h, x),
            numgrid::hermite_slope(log_[k], log_[k + 1], slope_[k], slope_[k + 1], h, x)};
  }

  double log_value(double r) const { return eval_s(r).first; }
  double value(double r) const { return std::exp(log_value(r)); }
  /// d log v / dr
  double log_derivative(double r) const { return eval_s(r).second / r; }

  /// Values as a SampledFunction; throws when a value overflows.
  SampledFunction samples() const
  {
    std::vector<double> v(size());
    for (std::size_t k = 0; k < v.size(); ++k)
      v[k] = std::exp(log_[k]);
    return SampledFunction(grid_, std::move(v));
  }

  SampledFunction log_derivative_samples() const
  {
    std::vector<double> v(size());
    for (std::size_t k = 0; k < v.size(); ++k)
      v[k] = dlog_at(k);
    return SampledFunction(grid_, std::move(v));
  }

  RadialProfile scaled(double c) const
  {
    if (!(c > 0.0))
      throw std::invalid_argument("RadialProfile::scaled: factor must be positive");
    auto l = log_;
    for (auto& x : l)
      x += std::log(c);
    return RadialProfile(grid_, std::move(l), slope_, curv_);
  }

private:
  GridPtr grid_;
  std::vector<double> log_;
  std::vector<double> slope_;
  std::vector<double> curv_;
};

// ---------------------------------------------------------------------------

/// Regular radial solution psi with psi(0) = 1, psi'(0) = 0.
///
/// Integrates the Riccati form q' = -(n-2) q + r^2 V - q^2, (log psi)' = q in
/// s = log r with RK4. Each grid step is subdivided where the equation is stiff.
inline RadialProfile solve_radial_solution(const RadialOperator& op)
{
  const LogGrid& g = *op.grid;
  const std::size_t m = g.size();
  const int n = op.n;
  const double h = g.step();
  std::vector<double> L(m), q(m), c(m);

  auto rhs = [&](double s, double qv) {
    const double r = std::exp(s);
    return -(n - 2) * qv + r * r * op.potential(r) - qv * qv;
  };

  const double r0 = g.t(0);
  const double a = op.potential(r0) * r0 * r0 / (2.0 * n);
  L[0] = std::log1p(a);
  q[0] = 2.0 * a / (1.0 + a);
  c[0] = rhs(g.s(0), q[0]);

  double Lc = L[0], qc = q[0];
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double s0 = g.s(k);
    const double r1 = g.t(k + 1);
    const double stiff = std::abs(n - 2.0) + 2.0 * std::abs(qc) +
                         r1 * std::sqrt(std::abs(op.potential(r1))) +
                         g.t(k) * std::sqrt(std::abs(op.potential(g.t(k))));
    const int sub = std::max(1, int(std::ceil(h * stiff / 0.8)));
    const double dt = h / sub;
    for (int i = 0; i < sub; ++i) {
      const double s = s0 + i * dt;
      const double k1 = rhs(s, qc);
      const double k2 = rhs(s + 0.5 * dt, qc + 0.5 * dt * k1);
      const double k3 = rhs(s + 0.5 * dt, qc + 0.5 * dt * k2);
      const double k4 = rhs(s + dt, qc + dt * k3);
      Lc += dt / 6.0 * (qc + 2 * (qc + 0.5 * dt * k1) + 2 * (qc + 0.5 * dt * k2) + (qc + dt * k3));
      qc += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
      if (!std::isfinite(qc) || qc < -1e8)
        throw std::domain_error("operator not nonnegative on grid: radial solution vanishes near r = " +
                                std::to_string(std::exp(s)));
    }
    L[k + 1] = Lc;
    q[k + 1] = qc;
    c[k + 1] = rhs(g.s(k + 1), qc);
  }
  return RadialProfile(op.grid, std::move(L), std::move(q), std::move(c));
}

// ---------------------------------------------------------------------------

struct CriticalityVerdict {
  double reference_radius = 1.0;
  double murata_integral = 0.0; ///< integral from reference_radius to infinity; +inf if divergent
  bool subcritical = false;
  double murata_slope = 0.0;    ///< growth of partial Murata integrals against log(cutoff)
  double tail_exponent = 0.0;   ///< local power of the Murata integrand at r_max
  // Divergence diagnostics of the two partial integrals (NaN until computed).
  double I_zero = std::numeric_limits<double>::quiet_NaN();
  double I_infinity = std::numeric_limits<double>::quiet_NaN();
  bool diverges_zero = false;
  bool diverges_infinity = false;
  bool critical = false; ///< both partial integrals diverge
};

struct GreenResult {
  std::optional<RadialProfile> g0;
  CriticalityVerdict verdict;
};

/// Slope of partial integrals against log(cutoff) above which an improper integral is divergent.
inline constexpr double divergence_slope = 0.05;

namespace detail {

/// Least-squares slope of y against x restricted to the decade x >= x.back() - ln 10.
inline double decade_slope(const std::vector<double>& x, const std::vector<double>& y)
{
  const double cut = x.back() - std::log(10.0);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= cut) {
      xs.push_back(x[i]);
      ys.push_back(y[i]);
    }
  if (xs.size() < 2)
    throw std::invalid_argument("grid too short for a decade regression");
  return numgrid::linear_fit(xs, ys).slope;
}

/// log of the integral over cell k of exp(phi(s)), phi given by Hermite data.
template <class Phi>
double log_cell_integral(const LogGrid& g, std::size_t, Phi&& phi, double a, double b)
{
  const double h = g.step();
  double x0 = 0.0, x1 = h;
  const double window = 60.0;
  if (a < 0 && b < 0)
    x1 = std::min(h, window / std::min(-a, -b));
  else if (a > 0 && b > 0)
    x0 = std::max(0.0, h - window / std::min(a, b));
  const double kappa = (x1 - x0) * std::max(std::abs(a), std::abs(b));
  const int panels = std::clamp(int(std::ceil(kappa / 0.5)), 1, 2000);
  const double ref = std::max(phi(x0), phi(x1));
  const auto& rule = numgrid::gauss_rule<8>();
  const double w = (x1 - x0) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = x0 + (p + 0.5) * w;
    for (int i = 0; i < 8; ++i)
      sum += rule.w[i] * std::exp(phi(mid + 0.5 * w * rule.x[i]) - ref);
  }
  return ref + std::log(0.5 * w * sum);
}

} // namespace detail

/// g0(r) = psi(r) * int_r^infinity t^{1-n} psi(t)^{-2} dt and the Murata verdict.
inline GreenResult green_from_psi(const RadialProfile& psi, const RadialOperator& op)
{
  const LogGrid& g = psi.grid();
  const std::size_t m = g.size();
  const int n = op.n;
  const double h = g.step();

  // Integrand in s: exp(Phi), Phi = (2-n)s - 2 log psi.
  std::vector<double> Phi(m), dPhi(m);
  for (std::size_t k = 0; k < m; ++k) {
    Phi[k] = (2.0 - n) * g.s(k) - 2.0 * psi.log_at(k);
    dPhi[k] = (2.0 - n) - 2.0 * psi.slope_at(k);
  }
  std::vector<double> logI(m - 1);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double sk = g.s(k);
    auto phi = [&](double x) { return (2.0 - n) * (sk + x) - 2.0 * psi.eval_s(std::exp(sk + x)).first; };
    (void)h;
    logI[k] = detail::log_cell_integral(g, k, phi, dPhi[k], dPhi[k + 1]);
  }

  GreenResult out;
  CriticalityVerdict& v = out.verdict;
  v.reference_radius = std::clamp(1.0, g.t_min(), g.t_max());
  const std::size_t kref = g.cell_of_s(std::log(v.reference_radius));

  // Partial Murata integrals from the reference node toward r_max.
  std::vector<double> xs, partial;
  double acc = 0.0;
  for (std::size_t k = kref; k + 1 < m; ++k) {
    acc += std::exp(logI[k]);
    xs.push_back(g.s(k + 1));
    partial.push_back(acc);
  }
  v.murata_slope = xs.size() >= 2 ? detail::decade_slope(xs, partial) : 0.0;
  v.tail_exponent = (1.0 - n) - 2.0 * psi.slope_at(m - 1);
  const bool tail_ok = v.tail_exponent < -1.0;
  v.subcritical = tail_ok && v.murata_slope <= divergence_slope;
  if (!v.subcritical) {
    v.murata_integral = std::numeric_limits<double>::infinity();
    return out;
  }

  // Backward accumulation of log(tail). Beyond r_max the integrand is
  // continued with its local exponent and curvature in s.
  std::vector<double> lt(m);
  {
    const double qe = psi.slope_at(m - 1);
    const double r = g.t(m - 1);
    const double qprime = -(n - 2.0) * qe + r * r * op.potential(r) - qe * qe;
    const double a = dPhi[m - 1], b = -2.0 * qprime;
    lt[m - 1] = Phi[m - 1] - std::log(-a) + std::log1p(std::max(-0.5, b / (a * a)));
  }
  for (std::size_t k = m - 1; k-- > 0;)
    lt[k] = detail::log_sum_exp(lt[k + 1], logI[k]);

  std::vector<double> Lg(m), dLg(m), cLg(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double E = std::exp(Phi[k] - lt[k]);
    const double qprime = -(n - 2.0) * psi.slope_at(k) +
                          g.t(k) * g.t(k) * op.potential(g.t(k)) -
                          psi.slope_at(k) * psi.slope_at(k);
    Lg[k] = psi.log_at(k) + lt[k];
    dLg[k] = psi.slope_at(k) - E;
    cLg[k] = qprime - E * (dPhi[k] + E);
  }
  out.g0 = RadialProfile(psi.grid_ptr(), std::move(Lg), std::move(dLg), std::move(cLg));
  v.murata_integral = std::exp(out.g0->log_value(v.reference_radius) -
                               psi.log_value(v.reference_radius));
  return out;
}

// ---------------------------------------------------------------------------

/// Sampled radial Hardy weight W(r) with both closed expressions recorded.
struct RadialWeight {
  int n = 3;
  GridPtr grid;
  std::vector<double> log_w;      ///< log of r^{2-2n} / (4 (psi g0)^2)
  std::vector<double> derivative; ///< 1/4 |(log(g0/psi))'|^2 from differences
  double max_gap = 0.0;           ///< largest relative disagreement of the two
  construct::Provenance provenance;

  double at(std::size_t k) const { return std::exp(log_w[k]); }
  double operator()(double r) const
  {
    numgrid::require_inside(*grid, r, "RadialWeight");
    return std::exp(numgrid::pchip_at(*grid, log_w, std::log(r)));
  }
  RadialFn fn() const
  {
    auto self = *this;
    return [self](double r) { return self(r); };
  }
  construct::HardyWeight field() const
  {
    construct::HardyWeight w;
    w.n = n;
    w.provenance = provenance;
    auto f = fn();
    w.eval = [f](const Vec& x) { return f(x.norm()); };
    return w;
  }
};

inline constexpr double weight_consistency_gate = 1e-6;

/// W(r) = 1/4 |(log(g0/psi))'|^2 = r^{2-2n} / (4 (psi g0)^2).
inline RadialWeight optimal_weight_radial(const RadialProfile& psi, const RadialProfile& g0, int n)
{
  const LogGrid& g = psi.grid();
  const std::size_t m = g.size();
  RadialWeight w;
  w.n = n;
  w.grid = psi.grid_ptr();
  w.log_w.resize(m);
  std::vector<double> ratio(m);
  for (std::size_t k = 0; k < m; ++k) {
    w.log_w[k] = (2.0 - 2.0 * n) * g.s(k) - std::log(4.0) - 2.0 * (psi.log_at(k) + g0.log_at(k));
    ratio[k] = g0.log_at(k) - psi.log_at(k);
  }
  const auto d = numgrid::differentiate_s(ratio, g.step(), numgrid::DiffOrder::fourth);
  w.derivative.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double dr = d[k] / g.t(k);
    w.derivative[k] = 0.25 * dr * dr;
    const double ref = std::exp(w.log_w[k]);
    w.max_gap = std::max(w.max_gap, std::abs(w.derivative[k] - ref) / ref);
  }
  w.provenance.formula = "radial optimal weight: W = r^{2-2n} / (4 (psi g0)^2)";
  w.provenance.generators = {"psi", "g0"};
  if (!(w.max_gap <= weight_consistency_gate))
    throw std::runtime_error("optimal_weight_radial: weight expressions disagree by " +
                             std::to_string(w.max_gap) + " (quadrature failure)");
  return w;
}

/// r^2 W(r) at r = 10 r_min; tends to ((n-2)/2)^2 near the pole.
inline double near_pole_value(const RadialWeight& w)
{
  const double r = 10.0 * w.grid->t_min();
  return r * r * w(r);
}

// ---------------------------------------------------------------------------

/// Divergence diagnostics for P - lambda W toward 0 and infinity.
///
/// The integrand t^{1-n} v^{-2} uses v = psi^{1-a} g0^{a}: toward infinity
/// a = alpha_minus (the solution of minimal growth at 0), toward 0
/// a = alpha_plus. For lambda = 1 both equal 1/2 and v^2 = psi g0.
inline CriticalityVerdict criticality_integrals(const RadialProfile& psi, const RadialProfile& g0,
                                                int n, double lambda = 1.0,
                                                CriticalityVerdict base = {})
{
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("criticality_integrals: lambda must lie in [0, 1]");
  const LogGrid& g = psi.grid();
  const std::size_t m = g.size();
  const double root = std::sqrt(1.0 - lambda);
  const double a_inf = 0.5 * (1.0 - root), a_zero = 0.5 * (1.0 + root);
  auto integrand = [&](std::size_t k, double a) {
    const double lv = (1.0 - a) * psi.log_at(k) + a * g0.log_at(k);
    return std::exp((2.0 - n) * g.s(k) - 2.0 * lv);
  };
  const double s_ref = 0.5 * (g.s_min() + g.s_max());
  const std::size_t kref = g.cell_of_s(s_ref);
  const double h = g.step();

  std::vector<double> x, y;
  double acc = 0.0;
  for (std::size_t k = kref; k + 1 < m; ++k) {
    acc += 0.5 * h * (integrand(k, a_inf) + integrand(k + 1, a_inf));
    x.push_back(g.s(k + 1));
    y.push_back(acc);
  }
  base.I_infinity = detail::decade_slope(x, y);
  x.clear();
  y.clear();
  acc = 0.0;
  for (std::size_t k = kref; k > 0; --k) {
    acc += 0.5 * h * (integrand(k, a_zero) + integrand(k - 1, a_zero));
    x.push_back(-g.s(k - 1));
    y.push_back(acc);
  }
  base.I_zero = detail::decade_slope(x, y);
  base.diverges_infinity = base.I_infinity > divergence_slope;
  base.diverges_zero = base.I_zero > divergence_slope;
  base.critical = base.diverges_infinity && base.diverges_zero;
  return base;
}

// ---------------------------------------------------------------------------

struct OscillationReport {
  int sign_changes = 0;
  double gu_quotient = 0.0; ///< limsup over the last decade of -lambda W / (4 W_opt)
  bool oscillatory = false; ///< gu_quotient < -1/4
};

/// Sign changes of the solution of -u'' - (n-1)/r u' + (V - lambda W) u = 0
/// started from u(r_lo) = 0, u'(r_lo) = 1.
inline OscillationReport oscillation_count(const RadialOperator& op, const RadialFn& W,
                                           double lambda, double r_lo, double r_hi,
                                           const RadialFn& W_opt = {})
{
  if (!(lambda >= 0.0))
    throw std::invalid_argument("oscillation_count: lambda must be nonnegative");
  if (!(r_lo > 0.0 && r_hi > r_lo))
    throw std::invalid_argument("oscillation_count: need 0 < r_lo < r_hi");
  numgrid::require_inside(*op.grid, r_lo, "oscillation_count");
  numgrid::require_inside(*op.grid, r_hi, "oscillation_count");
  const int n = op.n;
  const double s_lo = std::log(r_lo), s_hi = std::log(r_hi);
  const double h0 = op.grid->step();
  const auto steps = std::size_t(std::ceil((s_hi - s_lo) / h0));
  const double h = (s_hi - s_lo) / double(steps);
  auto coef = [&](double s) {
    const double r = std::exp(s);
    return r * r * (op.potential(r) - lambda * W(r));
  };
  // u_ss = -(n-2) u_s + coef(s) u
  double u = 0.0, us = r_lo;
  OscillationReport rep;
  int sign = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double s0 = s_lo + k * h;
    const double stiff = std::abs(n - 2.0) + std::sqrt(std::abs(coef(s0))) +
                         std::sqrt(std::abs(coef(s0 + h)));
    const int sub = std::max(1, int(std::ceil(h * stiff / 0.1)));
    const double dt = h / sub;
    for (int i = 0; i < sub; ++i) {
      const double s = s0 + i * dt;
      auto f = [&](double ss, double uu, double vv) { return -(n - 2.0) * vv + coef(ss) * uu; };
      const double c0 = f(s, u, us);
      const double u1 = u + 0.5 * dt * us, v1 = us + 0.5 * dt * c0;
      const double c1 = f(s + 0.5 * dt, u1, v1);
      const double u2 = u + 0.5 * dt * v1, v2 = us + 0.5 * dt * c1;
      const double c2 = f(s + 0.5 * dt, u2, v2);
      const double u3 = u + dt * v2, v3 = us + dt * c2;
      const double c3 = f(s + dt, u3, v3);
      u += dt / 6.0 * (us + 2 * v1 + 2 * v2 + v3);
      us += dt / 6.0 * (c0 + 2 * c1 + 2 * c2 + c3);
      const double scale = std::max(std::abs(u), std::abs(us));
      if (scale > 1e100) {
        u /= scale;
        us /= scale;
      }
      const int sg = u > 0 ? 1 : (u < 0 ? -1 : 0);
      if (sg != 0) {
        if (sign != 0 && sg != sign)
          ++rep.sign_changes;
        sign = sg;
      }
    }
  }
  const RadialFn& ref = W_opt ? W_opt : W;
  rep.gu_quotient = -std::numeric_limits<double>::infinity();
  const double s_cut = std::max(s_lo, s_hi - std::log(10.0));
  for (int i = 0; i <= 64; ++i) {
    const double r = std::exp(s_cut + (s_hi - s_cut) * i / 64.0);
    rep.gu_quotient = std::max(rep.gu_quotient, -lambda * W(r) / (4.0 * ref(r)));
  }
  rep.oscillatory = rep.gu_quotient < -0.25;
  return rep;
}

// ---------------------------------------------------------------------------

/// A pair (u, G) of radial solutions with G flux normalized, exposing the level
/// variable L = log(G/u), strictly decreasing in r.
struct GreenPair {
  int n = 3;
  RadialFn log_u, dlog_u; ///< log u and d/dr log u
  RadialFn log_G, dlog_G; ///< log G and d/dr log G
  double r_min = 0.0, r_max = 0.0;
  std::string label;
  RadialFn V; ///< potential of the operator; empty means V = 0

  double potential(double r) const { return V ? V(r) : 0.0; }
  double level(double r) const { return log_G(r) - log_u(r); }
  double dlevel(double r) const { return dlog_G(r) - dlog_u(r); }
  double weight(double r) const
  {
    const double d = dlevel(r);
    return 0.25 * d * d;
  }
  /// log(u G), the log of the squared ground state.
  double log_uG(double r) const { return log_u(r) + log_G(r); }

  double r_at_level(double L) const
  {
    const double s_lo = std::log(r_min), s_hi = std::log(r_max);
    const double L_hi = level(r_min), L_lo = level(r_max);
    if (!(L <= L_hi && L >= L_lo)) {
      std::ostringstream os;
      os << "level " << L << " outside grid range [" << L_lo << ", " << L_hi << "]";
      throw std::out_of_range(os.str());
    }
    const double s = numgrid::bisect([&](double ss) { return level(std::exp(ss)) - L; }, s_lo,
                                     s_hi, 1e-16);
    return std::exp(s);
  }

  /// Radius interval where L_lo <= log(G/u) <= L_hi.
  std::pair<double, double> shell(double L_lo, double L_hi) const
  {
    return {r_at_level(L_hi), r_at_level(L_lo)};
  }

  /// |S^{n-1}| * int_{r1}^{r2} f(r) r^{n-1} dr, Gauss-Legendre in s = log r.
  template <class F>
  double radial_integral(F&& f, double r1, double r2, double panel = 0.01) const
  {
    if (r1 >= r2)
      return 0.0;
    const double s1 = std::log(r1), s2 = std::log(r2);
    const int panels = std::max(16, int(std::ceil((s2 - s1) / panel)));
    const double area = sphere_area(n);
    return area * numgrid::integrate_gauss<8>(
                    [&](double s) {
                      const double r = std::exp(s);
                      return f(r) * std::exp(n * s);
                    },
                    s1, s2, panels);
  }
};

/// Integral of u G f over the level band L_lo <= log(G/u) <= L_hi, against dx.
template <class F>
double level_integral(const GreenPair& p, F&& f, double L_lo, double L_hi)
{
  if (L_lo > L_hi)
    throw std::invalid_argument("level_integral: empty band (lower level above upper)");
  if (L_lo == L_hi)
    return 0.0;
  const auto [r1, r2] = p.shell(L_lo, L_hi);
  return p.radial_integral([&](double r) { return std::exp(p.log_uG(r)) * f(r); }, r1, r2);
}

/// W-mass of the squared ground state uG over a level band; equals (L_hi - L_lo) / 4.
inline double level_mass(const GreenPair& p, double L_lo, double L_hi)
{
  return level_integral(p, [&p](double r) { return p.weight(r); }, L_lo, L_hi);
}

/// Classical pair u = 1, G = r^{2-n} / ((n-2) |S^{n-1}|), n >= 3.
inline GreenPair classical_pair(int n, double r_min = 1e-6, double r_max = 1e6)
{
  if (n < 3)
    throw std::invalid_argument("classical pair needs n >= 3");
  GreenPair p;
  p.n = n;
  p.r_min = r_min;
  p.r_max = r_max;
  p.label = "classical (u = 1, G = fundamental solution)";
  const double c = -std::log((n - 2.0) * sphere_area(n));
  p.log_u = [](double) { return 0.0; };
  p.dlog_u = [](double) { return 0.0; };
  p.log_G = [n, c](double r) { return (2.0 - n) * std::log(r) + c; };
  p.dlog_G = [n](double r) { return (2.0 - n) / r; };
  return p;
}

/// Yukawa pair in R^3: u = sinh r / r, G = e^{-r} / (4 pi r).
inline GreenPair yukawa_pair(double r_min = 1e-6, double r_max = 1e6)
{
  GreenPair p;
  p.n = 3;
  p.r_min = r_min;
  p.r_max = r_max;
  p.label = "Yukawa (u = sinh r / r, G = exp(-r) / (4 pi r))";
  p.V = [](double) { return 1.0; };
  p.log_u = [](double r) {
    if (r < 1e-4)
      return r * r / 6.0;
    if (r < 20.0)
      return std::log(std::sinh(r) / r);
    return r + std::log1p(-std::exp(-2.0 * r)) - std::log(2.0 * r);
  };
  p.dlog_u = [](double r) {
    if (r < 1e-4)
      return r / 3.0;
    return 1.0 / std::tanh(r) - 1.0 / r;
  };
  p.log_G = [](double r) { return -r - std::log(4.0 * pi * r); };
  p.dlog_G = [](double r) { return -1.0 - 1.0 / r; };
  return p;
}

/// Pair from computed profiles; G = g0 / |S^{n-1}| gives the flux normalization.
inline GreenPair pair_from_profiles(const RadialProfile& psi, const RadialProfile& g0, int n,
                                    RadialFn V = {})
{
  GreenPair p;
  p.V = std::move(V);
  p.n = n;
  p.r_min = psi.grid().t_min();
  p.r_max = psi.grid().t_max();
  p.label = "computed (psi, g0 / |S^{n-1}|)";
  const double c = -std::log(sphere_area(n));
  p.log_u = [psi](double r) { return psi.log_value(r); };
  p.dlog_u = [psi](double r) { return psi.log_derivative(r); };
  p.log_G = [g0, c](double r) { return g0.log_value(r) + c; };
  p.dlog_G = [g0](double r) { return g0.log_derivative(r); };
  return p;
}

/// Rescale factor taking the Murata-normalized g0 to the flux-normalized Green function.
inline double flux_normalization(int n) { return 1.0 / sphere_area(n); }

} // namespace hardy::radial
