#pragma once

// Logarithmic grids, quadrature and finite differences.
//
// Every sampled quantity in the library lives on a LogGrid: nodes form a
// geometric progression, so the log variable s = log t is uniform with step h.
// Quadrature and differencing are carried out in s.

#include "hardy/common.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace hardy::numgrid {

class LogGrid {
public:
  LogGrid(double t_min, double t_max, std::size_t m)
  {
    if (!std::isfinite(t_min) || !std::isfinite(t_max))
      throw std::invalid_argument("LogGrid: bounds must be finite");
    if (!(t_min > 0.0))
      throw std::invalid_argument("LogGrid: t_min must be positive");
    if (!(t_max > t_min))
      throw std::invalid_argument("LogGrid: empty range, need t_min < t_max");
    if (m < 3)
      throw std::invalid_argument("LogGrid: need at least 3 nodes");
    s_min_ = std::log(t_min);
    s_max_ = std::log(t_max);
    h_ = (s_max_ - s_min_) / double(m - 1);
    nodes_.resize(m);
    const double last = double(m - 1);
    for (std::size_t k = 0; k < m; ++k) {
      const double w = double(k) / last;
      nodes_[k] = std::exp((1.0 - w) * s_min_ + w * s_max_);
    }
    nodes_.front() = t_min;
    nodes_.back() = t_max;
  }

  std::size_t size() const { return nodes_.size(); }
  double t(std::size_t k) const { return nodes_[k]; }
  double s(std::size_t k) const
  {
    const double w = double(k) / double(size() - 1);
    return (1.0 - w) * s_min_ + w * s_max_;
  }
  double t_min() const { return nodes_.front(); }
  double t_max() const { return nodes_.back(); }
  double s_min() const { return s_min_; }
  double s_max() const { return s_max_; }
  /// Step in the log variable.
  double step() const { return h_; }
  const std::vector<double>& nodes() const { return nodes_; }

  bool contains(double t) const
  {
    const double tol = 1e-12;
    return t >= t_min() * (1.0 - tol) && t <= t_max() * (1.0 + tol);
  }

  /// Index k of the cell [t_k, t_{k+1}] holding log-coordinate s.
  std::size_t cell_of_s(double s) const
  {
    const double x = (s - s_min_) / h_;
    if (!(x > 0.0))
      return 0;
    const auto k = static_cast<std::size_t>(x);
    return std::min(k, size() - 2);
  }

private:
  double s_min_ = 0.0;
  double s_max_ = 0.0;
  double h_ = 0.0;
  std::vector<double> nodes_;
};

using GridPtr = std::shared_ptr<const LogGrid>;

inline GridPtr make_log_grid(double t_min, double t_max, std::size_t m)
{
  return std::make_shared<const LogGrid>(t_min, t_max, m);
}

class SampledFunction {
public:
  SampledFunction() = default;
  SampledFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values))
  {
    if (!grid_)
      throw std::invalid_argument("SampledFunction: null grid");
    if (values_.size() != grid_->size())
      throw std::invalid_argument("SampledFunction: sample count does not match grid");
    positive_ = true;
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (!std::isfinite(values_[k]))
        throw std::invalid_argument("SampledFunction: non-finite sample at node " +
                                    std::to_string(k));
      positive_ = positive_ && values_[k] > 0.0;
    }
  }

  template <class F>
  static SampledFunction sample(GridPtr grid, F&& f)
  {
    std::vector<double> v(grid->size());
    for (std::size_t k = 0; k < v.size(); ++k)
      v[k] = f(grid->t(k));
    return SampledFunction(std::move(grid), std::move(v));
  }

  const LogGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  std::size_t size() const { return values_.size(); }
  bool positive() const { return positive_; }

private:
  GridPtr grid_;
  std::vector<double> values_;
  bool positive_ = false;
};

// ---------------------------------------------------------------------------
// Interpolation

/// Cubic Hermite value on [0, h] at offset x, endpoint values y0, y1 and slopes d0, d1.
inline double hermite(double y0, double y1, double d0, double d1, double h, double x)
{
  const double u = x / h;
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * d0 +
         (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * h * d1;
}

/// Derivative of the Hermite cubic at offset x.
inline double hermite_slope(double y0, double y1, double d0, double d1, double h, double x)
{
  const double u = x / h;
  const double u2 = u * u;
  return (6 * u2 - 6 * u) * y0 / h + (3 * u2 - 4 * u + 1) * d0 +
         (-6 * u2 + 6 * u) * y1 / h + (3 * u2 - 2 * u) * d1;
}

/// Fritsch-Carlson slope at node k of uniformly spaced data.
inline double pchip_slope(const std::vector<double>& y, std::size_t k, double h)
{
  const std::size_t m = y.size();
  auto delta = [&](std::size_t i) { return (y[i + 1] - y[i]) / h; };
  if (k == 0 || k == m - 1) {
    const bool left = k == 0;
    const double d0 = left ? delta(0) : delta(m - 2);
    const double d1 = left ? delta(1) : delta(m - 3);
    double d = 0.5 * (3.0 * d0 - d1);
    if (d * d0 <= 0.0)
      d = 0.0;
    else if (d0 * d1 < 0.0 && std::abs(d) > 3.0 * std::abs(d0))
      d = 3.0 * d0;
    return d;
  }
  const double a = delta(k - 1), b = delta(k);
  if (a * b <= 0.0)
    return 0.0;
  return 2.0 / (1.0 / a + 1.0 / b);
}

/// Monotone cubic interpolation of uniform-in-s samples at log-coordinate s.
inline double pchip_at(const LogGrid& grid, const std::vector<double>& y, double s)
{
  const std::size_t k = grid.cell_of_s(s);
  const double h = grid.step();
  return hermite(y[k], y[k + 1], pchip_slope(y, k, h), pchip_slope(y, k + 1, h), h,
                 s - grid.s(k));
}

inline void require_inside(const LogGrid& grid, double t, const char* who)
{
  if (!grid.contains(t)) {
    std::ostringstream os;
    os.precision(17);
    os << who << ": point " << t << " outside grid [" << grid.t_min() << ", " << grid.t_max()
       << "]";
    throw std::out_of_range(os.str());
  }
}

/// Monotone cubic interpolation (shape preserving, in the log variable).
inline double interpolate(const SampledFunction& f, double t)
{
  require_inside(f.grid(), t, "interpolate");
  return pchip_at(f.grid(), f.values(), std::log(t));
}

// ---------------------------------------------------------------------------
// Quadrature

namespace detail {

inline std::vector<double> log_integrand(const SampledFunction& f)
{
  std::vector<double> g(f.size());
  for (std::size_t k = 0; k < g.size(); ++k)
    g[k] = f[k] * f.grid().t(k);
  return g;
}

inline double linear_at(const LogGrid& grid, const std::vector<double>& g, double s)
{
  const std::size_t k = grid.cell_of_s(s);
  const double w = (s - grid.s(k)) / grid.step();
  return (1.0 - w) * g[k] + w * g[k + 1];
}

} // namespace detail

/// Integral of f(t) dt over [a, b] by the trapezoid rule in s = log t.
/// Endpoints falling inside a cell are handled by linear interpolation of
/// f(t) t in s, which keeps the rule exactly additive.
inline double integrate(const SampledFunction& f, double a, double b)
{
  const LogGrid& grid = f.grid();
  require_inside(grid, a, "integrate");
  require_inside(grid, b, "integrate");
  if (a == b)
    return 0.0;
  if (a > b)
    return -integrate(f, b, a);
  const auto g = detail::log_integrand(f);
  const double sa = std::clamp(std::log(a), grid.s_min(), grid.s_max());
  const double sb = std::clamp(std::log(b), grid.s_min(), grid.s_max());
  const std::size_t ka = grid.cell_of_s(sa), kb = grid.cell_of_s(sb);
  const double ga = detail::linear_at(grid, g, sa), gb = detail::linear_at(grid, g, sb);
  if (ka == kb)
    return 0.5 * (sb - sa) * (ga + gb);
  double sum = 0.5 * (grid.s(ka + 1) - sa) * (ga + g[ka + 1]);
  for (std::size_t k = ka + 1; k < kb; ++k)
    sum += 0.5 * grid.step() * (g[k] + g[k + 1]);
  sum += 0.5 * (sb - grid.s(kb)) * (g[kb] + gb);
  return sum;
}

/// Running integral from t_min to each node.
inline SampledFunction cumulative_integral(const SampledFunction& f)
{
  const auto g = detail::log_integrand(f);
  std::vector<double> c(g.size(), 0.0);
  for (std::size_t k = 1; k < g.size(); ++k)
    c[k] = c[k - 1] + 0.5 * f.grid().step() * (g[k - 1] + g[k]);
  return SampledFunction(f.grid_ptr(), std::move(c));
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y ~ slope x + intercept.
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit: need at least two paired samples");
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("linear_fit: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

struct TailIntegral {
  double value = 0.0;    ///< body + tail, +inf when the tail diverges
  double body = 0.0;     ///< grid part
  double tail = 0.0;     ///< estimate beyond t_max
  double exponent = 0.0; ///< fitted power-law exponent of the last decade
  bool finite = true;
};

/// Power-law exponent of |f| over the last decade of the grid.
inline double tail_exponent(const SampledFunction& f)
{
  const LogGrid& grid = f.grid();
  const double t_cut = grid.t_max() / 10.0;
  std::vector<double> x, y;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid.t(k) < t_cut || f[k] == 0.0)
      continue;
    x.push_back(grid.s(k));
    y.push_back(std::log(std::abs(f[k])));
  }
  if (x.size() < 3) {
    x.clear();
    y.clear();
    for (std::size_t k = grid.size() - 3; k < grid.size(); ++k) {
      if (f[k] == 0.0)
        continue;
      x.push_back(grid.s(k));
      y.push_back(std::log(std::abs(f[k])));
    }
  }
  if (x.size() < 2)
    return -std::numeric_limits<double>::infinity();
  return linear_fit(x, y).slope;
}

/// Integral of f over [a, infinity): grid part plus power-law tail estimate.
inline TailIntegral integrate_to_infinity(const SampledFunction& f, double a)
{
  TailIntegral r;
  r.body = integrate(f, a, f.grid().t_max());
  const double last = f.values().back();
  r.exponent = tail_exponent(f);
  if (last == 0.0) {
    r.tail = 0.0;
  } else if (r.exponent < -1.0) {
    r.tail = last * f.grid().t_max() / (-r.exponent - 1.0);
  } else {
    r.finite = false;
    r.tail = std::copysign(std::numeric_limits<double>::infinity(), last);
  }
  r.value = r.body + r.tail;
  return r;
}

// ---------------------------------------------------------------------------
// Differentiation

enum class DiffOrder { second, fourth };

/// Derivative with respect to s = log t of uniform-in-s samples.
inline std::vector<double> differentiate_s(const std::vector<double>& y, double h,
                                           DiffOrder order = DiffOrder::second)
{
  const std::size_t m = y.size();
  std::vector<double> d(m);
  if (order == DiffOrder::fourth && m >= 5) {
    const double c = 1.0 / (12.0 * h);
    d[0] = c * (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]);
    d[1] = c * (-3 * y[0] - 10 * y[1] + 18 * y[2] - 6 * y[3] + y[4]);
    for (std::size_t k = 2; k + 2 < m; ++k)
      d[k] = c * (y[k - 2] - 8 * y[k - 1] + 8 * y[k + 1] - y[k + 2]);
    const std::size_t e = m - 1;
    d[e] = -c * (-25 * y[e] + 48 * y[e - 1] - 36 * y[e - 2] + 16 * y[e - 3] - 3 * y[e - 4]);
    d[e - 1] = -c * (-3 * y[e] - 10 * y[e - 1] + 18 * y[e - 2] - 6 * y[e - 3] + y[e - 4]);
    return d;
  }
  const double c = 1.0 / (2.0 * h);
  d[0] = c * (-3 * y[0] + 4 * y[1] - y[2]);
  for (std::size_t k = 1; k + 1 < m; ++k)
    d[k] = c * (y[k + 1] - y[k - 1]);
  d[m - 1] = c * (3 * y[m - 1] - 4 * y[m - 2] + y[m - 3]);
  return d;
}

/// df/dt by centered differences in s, one-sided at the ends.
inline SampledFunction differentiate(const SampledFunction& f,
                                     DiffOrder order = DiffOrder::second)
{
  auto d = differentiate_s(f.values(), f.grid().step(), order);
  for (std::size_t k = 0; k < d.size(); ++k)
    d[k] /= f.grid().t(k);
  return SampledFunction(f.grid_ptr(), std::move(d));
}

// ---------------------------------------------------------------------------
// Gauss-Legendre rules for smooth integrands off the grid

struct GaussRule {
  std::vector<double> x; ///< nodes on [-1, 1]
  std::vector<double> w;
};

inline GaussRule make_gauss_rule(int n)
{
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
        break;
    }
    r.x[i] = z;
    r.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return r;
}

template <int N>
const GaussRule& gauss_rule()
{
  static const GaussRule rule = make_gauss_rule(N);
  return rule;
}

/// Composite Gauss-Legendre quadrature of f over [a, b] with equal panels.
template <int N = 8, class F>
double integrate_gauss(F&& f, double a, double b, int panels)
{
  const GaussRule& rule = gauss_rule<N>();
  const double w = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * w;
    for (int i = 0; i < N; ++i)
      sum += rule.w[i] * f(mid + 0.5 * w * rule.x[i]);
  }
  return 0.5 * w * sum;
}

/// Root of a monotone function on [lo, hi] by bisection; f(lo) and f(hi) must bracket.
template <class F>
double bisect(F&& f, double lo, double hi, double tol = 1e-15, int max_iter = 200)
{
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0)
    return lo;
  if (fhi == 0.0)
    return hi;
  if ((flo > 0) == (fhi > 0))
    throw std::domain_error("bisect: root not bracketed");
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0)
      return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (std::abs(hi - lo) <= tol * std::max(1.0, std::abs(mid)))
      break;
  }
  return 0.5 * (lo + hi);
}

} // namespace hardy::numgrid
