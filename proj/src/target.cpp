#include "alps/target.hpp"

#include "alps/error.hpp"

#include <algorithm>
#include <cmath>

namespace alps {

Vector TargetDensity::gradient(const Vector&) const {
  throw ConfigError(name() + ": no analytic gradient");
}

Matrix TargetDensity::hessian(const Vector&) const {
  throw ConfigError(name() + ": no analytic Hessian");
}

FunctionTarget::FunctionTarget(Eigen::Index dim, LogDensity f, Gradient g, Hessian h,
                               std::string name)
    : dim_(dim), f_(std::move(f)), g_(std::move(g)), h_(std::move(h)), name_(std::move(name)) {
  if (dim <= 0) throw ConfigError("FunctionTarget: dimension must be positive");
  if (!f_) throw ConfigError("FunctionTarget: log-density callable is empty");
}

Vector FunctionTarget::gradient(const Vector& x) const {
  if (!g_) return TargetDensity::gradient(x);
  return g_(x);
}

Matrix FunctionTarget::hessian(const Vector& x) const {
  if (!h_) return TargetDensity::hessian(x);
  return h_(x);
}

Vector finite_difference_gradient(const TargetDensity& target, const Vector& x,
                                  double step) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    const double fp = target.log_density(xp);
    xp[i] = x[i] - h;
    const double fm = target.log_density(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace alps
