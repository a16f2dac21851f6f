#include "alps/scaling.hpp"

#include "alps/error.hpp"
#include "alps/rng.hpp"
#include "alps/special.hpp"
#include "alps/targets/skew_normal.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace alps {

double predicted_acceptance(double h3, double h2, double ell) {
  if (!(h2 < 0.0)) throw ConfigError("predicted_acceptance: h2 must be negative");
  if (!(ell > 0.0)) throw ConfigError("predicted_acceptance: ell must be positive");
  const double arg = std::sqrt(15.0 * h3 * h3 / (36.0 * ell * std::pow(-h2, 3)));
  return 2.0 * normal_cdf(-arg / std::sqrt(2.0));
}

double richardson_derivative(const ScalarShape& h, int order, double x, double step, int levels) {
  if (order != 2 && order != 3) throw ConfigError("richardson_derivative: order must be 2 or 3");
  if (levels < 1 || !(step > 0.0)) throw ConfigError("richardson_derivative: bad step schedule");
  auto central = [&](double s) {
    if (order == 2) return (h(x + s) - 2.0 * h(x) + h(x - s)) / (s * s);
    return (h(x + 2 * s) - 2.0 * h(x + s) + 2.0 * h(x - s) - h(x - 2 * s)) / (2.0 * s * s * s);
  };
  std::vector<std::vector<double>> table(levels);
  double s = step;
  for (int k = 0; k < levels; ++k, s *= 0.5) {
    table[k].push_back(central(s));
    double factor = 4.0;
    for (int j = 1; j <= k; ++j, factor *= 4.0) {
      table[k].push_back(table[k][j - 1] + (table[k][j - 1] - table[k - 1][j - 1]) / (factor - 1.0));
    }
  }
  return table.back().back();
}

ScalingShape make_scaling_shape(const std::string& name, double alpha) {
  ScalingShape s;
  s.name = name;
  if (name == "gaussian") {
    s.h = [](double x) { return -0.5 * x * x; };
    s.h2 = -1.0;
    s.h3 = 0.0;
    return s;
  }
  if (name == "skew_normal") {
    if (!std::isfinite(alpha)) throw ConfigError("skew_normal shape: alpha must be finite");
    s.h = CenteredSkewNormal(alpha);
    s.h2 = richardson_derivative(s.h, 2);
    s.h3 = richardson_derivative(s.h, 3);
    return s;
  }
  throw ConfigError("unknown scaling shape '" + name + "' (known: gaussian, skew_normal)");
}

TemperedShapeSampler::TemperedShapeSampler(const ScalingShape& shape, double beta)
    : h_(shape.h), beta_(beta) {
  if (!(beta > 0.0)) throw ConfigError("tempered shape: beta must be positive");
  if (!(shape.h2 < 0.0)) throw ConfigError("tempered shape: h''(0) must be negative");
  const double abs_h2 = -shape.h2;
  const double c = 2.0 * std::max(1.0, abs_h2);
  curvature_ = beta * abs_h2 / c;
  sd_ = std::sqrt(c / (beta * abs_h2));

  // sup of h(x) + |h2| x^2 / (2c): grid, then Brent around the best node.
  auto g = [&](double x) { return h_(x) + 0.5 * (abs_h2 / c) * x * x; };
  const double half = 60.0;
  const int points = 24001;
  const double dx = 2.0 * half / (points - 1);
  double best_x = 0.0;
  double best = g(0.0);
  for (int i = 0; i < points; ++i) {
    const double x = -half + i * dx;
    const double v = g(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  const auto refined = boost::math::tools::brent_find_minima([&](double x) { return -g(x); },
                                                             best_x - dx, best_x + dx, 52);
  best = std::max(best, -refined.second);
  log_bound_ = beta * best;
}

double TemperedShapeSampler::excess(double x) const { return beta_ * h_(x) + 0.5 * curvature_ * x * x; }

void TemperedShapeSampler::violation(double x, double value) const {
  std::ostringstream msg;
  msg.precision(17);
  msg << "rejection envelope violated at x = " << x << " (log ratio " << value << " above bound "
      << log_bound_ << ")";
  throw NumericalError(msg.str());
}

std::vector<ScalingRow> scaling_experiment(const ScalingExperimentConfig& cfg) {
  if (cfg.dims.empty()) throw ConfigError("scaling: no dimensions");
  if (cfg.samples < 2) throw ConfigError("scaling: need at least two samples");
  if (!(cfg.ell > 0.0)) throw ConfigError("scaling: ell must be positive");
  const ScalingShape shape = make_scaling_shape(cfg.shape, cfg.alpha);
  check_unique_maximum_at_zero(shape.h);
  const double predicted = predicted_acceptance(shape.h3, shape.h2, cfg.ell);
  const double abs_h2 = -shape.h2;

  std::vector<ScalingRow> rows;
  for (std::size_t slot = 0; slot < cfg.dims.size(); ++slot) {
    const int d = cfg.dims[slot];
    if (d <= 0) throw ConfigError("scaling: dimensions must be positive");
    const double beta = cfg.ell * d;
    const TemperedShapeSampler sampler(shape, beta);
    const double proposal_sd = 1.0 / std::sqrt(beta * abs_h2);
    // h plus the proposal's quadratic; the leap log-ratio is beta times the
    // difference of this function at y and at x, summed over coordinates.
    auto g = [&](double v) { return shape.h(v) + 0.5 * abs_h2 * v * v; };

    Stream rng(cfg.seed, purpose::kScaling + static_cast<std::uint32_t>(slot), 0);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::uint64_t i = 0; i < cfg.samples; ++i) {
      double log_ratio = 0.0;
      for (int j = 0; j < d; ++j) {
        const double x = sampler.draw(rng);
        const double y = proposal_sd * rng.normal();
        log_ratio += g(y) - g(x);
      }
      log_ratio *= beta;
      const double a = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
      const double delta = a - mean;
      mean += delta / static_cast<double>(i + 1);
      m2 += delta * (a - mean);
    }
    const double n = static_cast<double>(cfg.samples);
    rows.push_back({d, beta, mean, std::sqrt(m2 / (n - 1.0) / n), predicted});
  }
  return rows;
}

}  // namespace alps
