#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hardy {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Function of the radial variable r > 0.
using RadialFn = std::function<double(double)>;

inline constexpr double pi = std::numbers::pi;

/// Area of the unit sphere S^{n-1} in R^n.
inline double sphere_area(int n)
{
  return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Classical Hardy constant ((n-2)/2)^2.
inline double hardy_constant(int n)
{
  const double h = 0.5 * (n - 2);
  return h * h;
}

/// Raised when an iterative solver stops without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double residual)
    : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

inline std::string format_sci(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string format_point(const Vec& x)
{
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i)
    os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

} // namespace hardy
