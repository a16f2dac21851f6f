#pragma once

#include "alps/targets/iid_product.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace alps {

/// Limiting leap acceptance 2 Phi(-sqrt(15 h3^2 / (36 ell |h2|^3)) / sqrt(2)).
/// Throws ConfigError unless h2 < 0 and ell > 0.
double predicted_acceptance(double h3, double h2, double ell);

/// Derivative of the given order (2 or 3) at x by central differences with
/// Richardson extrapolation over `levels` halvings of `step`.
double richardson_derivative(const ScalarShape& h, int order, double x = 0.0, double step = 0.1,
                             int levels = 5);

/// A 1-d log-shape with its maximum at 0 and the derivatives used by the
/// limiting formula.
struct ScalingShape {
  std::string name;
  ScalarShape h;
  double h2 = 0.0;
  double h3 = 0.0;
};

/// "gaussian" (h = -x^2/2, exact derivatives) or "skew_normal" (recentred
/// skew-normal, extrapolated derivatives).
ScalingShape make_scaling_shape(const std::string& name, double alpha = 3.0);

/// Exact draws from the density proportional to exp(beta h(x)) by rejection
/// from N(0, c / (beta |h2|)) with c = 2 max(1, |h2|). The envelope bound is
/// located on a grid and refined; a sampled point above it raises
/// NumericalError naming the abscissa.
class TemperedShapeSampler {
 public:
  TemperedShapeSampler(const ScalingShape& shape, double beta);

  template <class Rng>
  double draw(Rng& rng) const;

  double envelope_sd() const { return sd_; }
  double log_bound() const { return log_bound_; }

 private:
  double excess(double x) const;  // beta h(x) + beta |h2| x^2 / (2c)
  [[noreturn]] void violation(double x, double value) const;

  ScalarShape h_;
  double beta_;
  double curvature_;  // beta |h2| / c
  double sd_;
  double log_bound_;
};

template <class Rng>
double TemperedShapeSampler::draw(Rng& rng) const {
  for (;;) {
    const double z = sd_ * rng.normal();
    const double e = excess(z);
    if (e > log_bound_ + 1e-9 * std::max(1.0, std::abs(log_bound_))) violation(z, e);
    if (std::log(rng.uniform()) < e - log_bound_) return z;
  }
}

struct ScalingExperimentConfig {
  std::string shape = "skew_normal";
  double alpha = 3.0;
  double ell = 1.0;
  std::vector<int> dims = {10, 20, 40, 80};
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
};

struct ScalingRow {
  int d = 0;
  double beta = 0.0;
  double observed_rate = 0.0;
  double mc_stderr = 0.0;
  double predicted_rate = 0.0;
};

/// For each d: beta = ell d, x from the tempered product, y from the
/// Gaussian leap proposal N(0, (beta |h2|)^{-1} I), and the Monte Carlo mean
/// of min(1, exp(B)) for the independence-sampler log-ratio B.
std::vector<ScalingRow> scaling_experiment(const ScalingExperimentConfig& cfg);

}  // namespace alps
