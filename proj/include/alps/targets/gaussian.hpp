#pragma once

#include "alps/linalg.hpp"
#include "alps/target.hpp"

#include <vector>

namespace alps {

/// Multivariate normal N(mu, Sigma), normalised.
class GaussianTarget final : public TargetDensity {
 public:
  GaussianTarget(Vector mu, Matrix sigma);

  Eigen::Index dim() const override { return mu_.size(); }
  double log_density(const Vector& x) const override;
  bool has_gradient() const override { return true; }
  Vector gradient(const Vector& x) const override;
  bool has_hessian() const override { return true; }
  Matrix hessian(const Vector& x) const override;
  std::string name() const override { return "gaussian"; }

  const Vector& mean() const { return mu_; }
  const Matrix& covariance() const { return sigma_; }

 private:
  Vector mu_;
  Matrix sigma_;
  Matrix chol_;
  Matrix precision_;
  double log_det_;
};

struct GaussianComponent {
  double weight = 1.0;
  Vector mu;
  Matrix sigma;
};

/// Finite Gaussian mixture; weights are normalised on construction.
class GaussianMixtureTarget final : public TargetDensity {
 public:
  explicit GaussianMixtureTarget(std::vector<GaussianComponent> components);

  Eigen::Index dim() const override { return components_.front().mu.size(); }
  double log_density(const Vector& x) const override;
  bool has_gradient() const override { return true; }
  Vector gradient(const Vector& x) const override;
  std::string name() const override { return "gaussian_mixture"; }

  std::size_t size() const { return components_.size(); }
  const GaussianComponent& component(std::size_t j) const { return components_.at(j); }

 private:
  std::vector<double> component_terms(const Vector& x) const;

  std::vector<GaussianComponent> components_;
  std::vector<double> log_w_;
  std::vector<Matrix> chol_;
  std::vector<double> log_det_;
};

}  // namespace alps
