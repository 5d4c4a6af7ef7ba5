#pragma once

// Supersolution construction: Hardy weights from pairs and tuples of positive
// solutions, and the solution families of P - lambda W built from a pair.

#include "hardy/common.hpp"

#include <array>
#include <span>
#include <vector>

namespace hardy::construct {

using PointFn = std::function<double(const Vec&)>;
using GradFn = std::function<Vec(const Vec&)>;

/// Central-difference step used when a field has no closed-form gradient.
inline double fd_step(const Vec& x) { return 1e-5 * (1.0 + x.norm()); }

inline Vec fd_gradient(const PointFn& f, const Vec& x)
{
  const double h = fd_step(x);
  Vec g(x.size());
  Vec xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
    xp[i] = xm[i] = x[i];
  }
  return g;
}

/// Fourth-order finite-difference Laplacian with step h.
inline double fd_laplacian(const PointFn& f, const Vec& x, double h)
{
  const double f0 = f(x);
  double sum = 0.0;
  Vec y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    auto at = [&](double d) {
      y[i] = x[i] + d;
      const double v = f(y);
      y[i] = x[i];
      return v;
    };
    sum += (-at(2 * h) + 16 * at(h) - 30 * f0 + 16 * at(-h) - at(-2 * h)) / (12 * h * h);
  }
  return sum;
}

struct ScalarField {
  int n = 0;
  PointFn value;
  GradFn gradient; ///< optional; central differences when empty
  std::string label = "field";

  double operator()(const Vec& x) const { return value(x); }

  Vec grad(const Vec& x) const { return gradient ? gradient(x) : fd_gradient(value, x); }

  /// Value at x, rejecting non-positive results.
  double positive_at(const Vec& x) const
  {
    const double v = value(x);
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::domain_error(label + " is not positive at " + format_point(x));
    return v;
  }

  Vec grad_log(const Vec& x) const { return grad(x) / positive_at(x); }
};

/// Radial field f(|x - c|) with optional closed-form derivative df.
inline ScalarField radial_field(int n, RadialFn f, RadialFn df = {}, Vec center = {},
                                std::string label = "radial field")
{
  if (center.size() == 0)
    center = Vec::Zero(n);
  ScalarField s;
  s.n = n;
  s.label = std::move(label);
  s.value = [f, center](const Vec& x) { return f((x - center).norm()); };
  if (df) {
    s.gradient = [df, center](const Vec& x) -> Vec {
      const Vec d = x - center;
      const double r = d.norm();
      return df(r) / r * d;
    };
  }
  return s;
}

/// |x - c|^p with closed-form gradient.
inline ScalarField power_field(int n, double p, Vec center = {})
{
  return radial_field(
    n, [p](double r) { return std::pow(r, p); },
    [p](double r) { return p * std::pow(r, p - 1.0); }, std::move(center),
    "|x-c|^" + std::to_string(p));
}

inline ScalarField constant_field(int n, double c = 1.0)
{
  ScalarField s;
  s.n = n;
  s.label = "constant";
  s.value = [c](const Vec&) { return c; };
  s.gradient = [n](const Vec&) -> Vec { return Vec::Zero(n); };
  return s;
}

struct MetricSpec {
  std::function<Mat(const Vec&)> A; ///< empty means identity
  PointFn density;                  ///< empty means 1

  bool identity() const { return !A; }
  double rho(const Vec& x) const { return density ? density(x) : 1.0; }

  /// v^T A(x) v
  double norm2(const Vec& x, const Vec& v) const
  {
    if (!A)
      return v.squaredNorm();
    return v.dot(A(x) * v);
  }

  /// v^T A(x)^{-1} v
  double dual_norm2(const Vec& x, const Vec& v) const
  {
    if (!A)
      return v.squaredNorm();
    return v.dot(A(x).llt().solve(v));
  }

  /// Symmetry and positive definiteness of A at x.
  void validate_at(const Vec& x) const
  {
    if (!A)
      return;
    const Mat a = A(x);
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()))
      throw std::domain_error("metric A is not symmetric at " + format_point(x));
    Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0.0))
      throw std::domain_error("metric A is not positive definite at " + format_point(x));
    if (!(rho(x) > 0.0))
      throw std::domain_error("measure density is not positive at " + format_point(x));
  }
};

/// Elliptic operator data: P = -div(A grad) + V with measure density f.
struct OperatorSpec {
  int n = 3;
  MetricSpec metric;
  PointFn V; ///< empty means V = 0
  std::string description;
};

struct Provenance {
  std::string formula;
  std::vector<std::string> generators;
  std::string notes;
  bool degenerate = false;
};

struct HardyWeight {
  int n = 0;
  PointFn eval;
  Provenance provenance;

  double operator()(const Vec& x) const { return eval(x); }
};

namespace detail {

inline void mark_degenerate(HardyWeight& w, std::span<const Vec> probes,
                            const std::function<double(const Vec&)>& scale)
{
  if (probes.empty())
    return;
  bool all_zero = true;
  for (const Vec& x : probes) {
    const double v = w(x);
    if (!(v >= 0.0))
      throw std::domain_error("weight is negative or undefined at " + format_point(x));
    all_zero = all_zero && v <= 1e-12 * scale(x);
  }
  w.provenance.degenerate = all_zero;
  if (all_zero)
    w.provenance.notes += (w.provenance.notes.empty() ? "" : "; ") +
                          std::string("generators proportional: weight vanishes identically");
}

} // namespace detail

/// W = 1/4 |grad log(v0/v1)|_A^2. Probe points, when given, are checked for
/// positivity of the fields and used to detect a proportional (degenerate) pair.
inline HardyWeight hardy_weight_pair(const ScalarField& v0, const ScalarField& v1,
                                     const MetricSpec& metric = {},
                                     std::span<const Vec> probes = {})
{
  if (v0.n != v1.n)
    throw std::invalid_argument("hardy_weight_pair: fields have different dimensions");
  HardyWeight w;
  w.n = v0.n;
  w.provenance.formula = "pair: W = 1/4 |grad log(v0/v1)|_A^2";
  w.provenance.generators = {v0.label, v1.label};
  w.eval = [v0, v1, metric](const Vec& x) {
    const Vec d = v0.grad_log(x) - v1.grad_log(x);
    return 0.25 * metric.norm2(x, d);
  };
  for (const Vec& x : probes) {
    metric.validate_at(x);
    v0.positive_at(x);
    v1.positive_at(x);
  }
  detail::mark_degenerate(w, probes, [v0, v1, metric](const Vec& x) {
    return metric.norm2(x, v0.grad_log(x)) + metric.norm2(x, v1.grad_log(x));
  });
  return w;
}

/// W = sum_{i<j} alpha_i alpha_j |grad log(u_i/u_j)|_A^2 with sum alpha = 1.
inline HardyWeight hardy_weight_multi(const std::vector<ScalarField>& u,
                                      const std::vector<double>& alpha,
                                      const MetricSpec& metric = {},
                                      std::span<const Vec> probes = {})
{
  if (u.size() < 2)
    throw std::invalid_argument("hardy_weight_multi: need at least two solutions");
  if (alpha.size() != u.size())
    throw std::invalid_argument("hardy_weight_multi: one coefficient per solution required");
  double total = 0.0;
  for (double a : alpha) {
    if (!(a >= 0.0))
      throw std::invalid_argument("hardy_weight_multi: coefficients must be nonnegative");
    total += a;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("hardy_weight_multi: coefficients must sum to 1");
  HardyWeight w;
  w.n = u.front().n;
  w.provenance.formula = "tuple: W = sum_{i<j} a_i a_j |grad log(u_i/u_j)|_A^2";
  for (const auto& f : u)
    w.provenance.generators.push_back(f.label);
  w.eval = [u, alpha, metric](const Vec& x) {
    std::vector<Vec> g;
    g.reserve(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      g.push_back(alpha[i] > 0.0 ? u[i].grad_log(x) : Vec::Zero(x.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = i + 1; j < u.size(); ++j)
        if (alpha[i] > 0.0 && alpha[j] > 0.0)
          sum += alpha[i] * alpha[j] * metric.norm2(x, g[i] - g[j]);
    return sum;
  };
  for (const Vec& x : probes) {
    metric.validate_at(x);
    for (const auto& f : u)
      f.positive_at(x);
  }
  detail::mark_degenerate(w, probes, [u, metric](const Vec& x) {
    double s = 0.0;
    for (const auto& f : u)
      s += metric.norm2(x, f.grad_log(x));
    return s;
  });
  return w;
}

enum class SolutionKind { subcritical_pair, critical_log, oscillatory_pair };

inline const char* to_string(SolutionKind k)
{
  switch (k) {
  case SolutionKind::subcritical_pair: return "subcritical-pair";
  case SolutionKind::critical_log: return "critical-log";
  case SolutionKind::oscillatory_pair: return "oscillatory-pair";
  }
  return "?";
}

/// Two solutions of (P - lambda W) w = 0 built from the pair (v0, v1).
struct SolutionBasis {
  double lambda = 0.0;
  SolutionKind kind = SolutionKind::subcritical_pair;
  double alpha_plus = 0.0;
  double alpha_minus = 0.0;
  double xi = 0.0; ///< sqrt(lambda - 1)/2 for the oscillatory kind
  std::array<PointFn, 2> members;
  PointFn amplitude; ///< sqrt(v0 v1), critical and oscillatory kinds
  PointFn phase;     ///< xi log(v1/v0), oscillatory kind
};

inline SolutionBasis associated_solutions(const ScalarField& v0, const ScalarField& v1,
                                          double lambda)
{
  if (!std::isfinite(lambda))
    throw std::invalid_argument("associated_solutions: lambda must be finite");
  SolutionBasis b;
  b.lambda = lambda;
  auto log0 = [v0](const Vec& x) { return std::log(v0.positive_at(x)); };
  auto log1 = [v1](const Vec& x) { return std::log(v1.positive_at(x)); };
  if (lambda < 1.0) {
    b.kind = SolutionKind::subcritical_pair;
    const double r = std::sqrt(1.0 - lambda);
    b.alpha_plus = 0.5 * (1.0 + r);
    b.alpha_minus = 0.5 * (1.0 - r);
    for (int i = 0; i < 2; ++i) {
      const double a = i == 0 ? b.alpha_plus : b.alpha_minus;
      b.members[i] = [=](const Vec& x) { return std::exp(a * log1(x) + (1.0 - a) * log0(x)); };
    }
    return b;
  }
  b.alpha_plus = b.alpha_minus = 0.5;
  b.amplitude = [=](const Vec& x) { return std::exp(0.5 * (log0(x) + log1(x))); };
  if (lambda == 1.0) {
    b.kind = SolutionKind::critical_log;
    b.members[0] = b.amplitude;
    b.members[1] = [=](const Vec& x) {
      const double l0 = log0(x), l1 = log1(x);
      return std::exp(0.5 * (l0 + l1)) * (l0 - l1);
    };
    return b;
  }
  b.kind = SolutionKind::oscillatory_pair;
  b.xi = 0.5 * std::sqrt(lambda - 1.0);
  const double xi = b.xi;
  b.phase = [=](const Vec& x) { return xi * (log1(x) - log0(x)); };
  const auto amp = b.amplitude;
  const auto ph = b.phase;
  b.members[0] = [=](const Vec& x) { return amp(x) * std::cos(ph(x)); };
  b.members[1] = [=](const Vec& x) { return amp(x) * std::sin(ph(x)); };
  return b;
}

/// Finite-difference residual of (-Delta + V - lambda W) w at x, for the
/// isotropic case A = Id, unit density. Scaled by the sizes of the three terms
/// and by |w| W, the natural curvature scale, so harmonic members do not divide
/// rounding noise by itself.
inline double schrodinger_residual(const PointFn& w, const PointFn& V, const PointFn& W,
                                   double lambda, const Vec& x, double h = 0.0)
{
  if (h <= 0.0)
    h = 1e-3 * (1.0 + x.norm());
  const double wx = w(x);
  const double lap = fd_laplacian(w, x, h);
  const double pot = V ? V(x) * wx : 0.0;
  const double wt = lambda * W(x) * wx;
  const double res = -lap + pot - wt;
  const double scale = std::abs(lap) + std::abs(pot) + std::abs(wt) + std::abs(wx) * W(x);
  return scale == 0.0 ? std::abs(res) : std::abs(res) / scale;
}

} // namespace hardy::construct
