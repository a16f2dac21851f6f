#include "alps/special.hpp"

#include "alps/error.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace alps {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mills ratio R(t) = (1 - Phi(t)) / phi(t) for t >= 5 by the Laplace
// continued fraction, evaluated bottom-up.
double mills_ratio_tail(double t) {
  double frac = 0.0;
  for (int k = 80; k >= 1; --k) frac = k / (t + frac);
  return 1.0 / (t + frac);
}

constexpr double kTailSwitch = -5.0;

}  // namespace

double logsumexp(std::span<const double> v) {
  if (v.empty()) return -kInf;
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double log_normal_pdf(double x) {
  return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_normal_cdf(double x) {
  if (x > kTailSwitch) return std::log(normal_cdf(x));
  return log_normal_pdf(x) + std::log(mills_ratio_tail(-x));
}

double normal_hazard(double x) {
  if (x > kTailSwitch) return std::exp(log_normal_pdf(x) - log_normal_cdf(x));
  return 1.0 / mills_ratio_tail(-x);
}

double regularized_gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(a, x);
}

double chi_squared_quantile(double p, double dof) {
  if (!(p > 0.0 && p < 1.0) || !(dof > 0.0)) {
    throw ConfigError("chi_squared_quantile: need 0 < p < 1 and dof > 0");
  }
  // Normal quantile by bisection; only a starting point is needed.
  double za = -40.0, zb = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (za + zb);
    (normal_cdf(m) < p ? za : zb) = m;
  }
  const double z = 0.5 * (za + zb);

  // Wilson-Hilferty: (X/k)^{1/3} is roughly N(1 - 2/(9k), 2/(9k)).
  const double c = 2.0 / (9.0 * dof);
  const double guess = dof * std::pow(std::max(1.0 - c + z * std::sqrt(c), 1e-3), 3);

  auto cdf = [dof](double x) { return regularized_gamma_p(0.5 * dof, 0.5 * x); };
  double lo = 0.5 * guess;
  double hi = 2.0 * guess + 1.0;
  while (cdf(lo) > p) lo *= 0.5;
  while (cdf(hi) < p) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double m = 0.5 * (lo + hi);
    (cdf(m) < p ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

}  // namespace alps
