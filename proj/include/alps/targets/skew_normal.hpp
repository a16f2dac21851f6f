#pragma once

#include "alps/linalg.hpp"
#include "alps/target.hpp"

#include <vector>

namespace alps {

/// Equally weighted mixture of product skew-normal components
///   prod_j (2 / w_k) phi(z_j) Phi(alpha z_j),  z_j = (x_j - mu_kj) / w_k.
/// Each component integrates to one, so the mixture weights are exactly 1/K
/// regardless of the scales.
class SkewNormalMixtureTarget final : public TargetDensity {
 public:
  SkewNormalMixtureTarget(double alpha, std::vector<Vector> locations, std::vector<double> scales);

  Eigen::Index dim() const override { return locations_.front().size(); }
  double log_density(const Vector& x) const override;
  bool has_gradient() const override { return true; }
  Vector gradient(const Vector& x) const override;
  std::string name() const override { return "skew_normal_mixture"; }

  double alpha() const { return alpha_; }
  std::size_t size() const { return locations_.size(); }
  const Vector& location(std::size_t k) const { return locations_.at(k); }
  double scale(std::size_t k) const { return scales_.at(k); }

  /// log of component k's density (without the 1/K weight).
  double log_component(std::size_t k, const Vector& x) const;
  /// Component with the largest density at x; ties go to the lowest index.
  std::size_t nearest_component(const Vector& x) const;
  /// Mode point of component k.
  Vector component_mode(std::size_t k) const;

 private:
  double alpha_;
  std::vector<Vector> locations_;
  std::vector<double> scales_;
};

/// The four-mode benchmark: locations (c, .., c), -(c, .., c) with c = 20
/// and scale 1, then (-10 in the first half, +10 in the second half) and
/// its negation with scale 2. `dim` must be even.
SkewNormalMixtureTarget make_four_mode_benchmark(Eigen::Index dim = 20, double alpha = 10.0);

/// Mode of the standard skew-normal density 2 phi(z) Phi(alpha z).
double skew_normal_mode(double alpha);

/// 1-d skew-normal log-shape recentred at its mode,
///   h(x) = log f(x + m) - log f(m),  f(z) = 2 phi(z) Phi(alpha z),
/// so that h(0) = 0 = h'(0) and h''(0) < 0.
class CenteredSkewNormal {
 public:
  explicit CenteredSkewNormal(double alpha);

  double operator()(double x) const;
  double alpha() const { return alpha_; }
  double shift() const { return mode_; }

 private:
  double alpha_;
  double mode_;
  double log_f_mode_;
};

}  // namespace alps
