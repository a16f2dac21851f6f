#include "alps/targets/gaussian.hpp"

#include "alps/error.hpp"
#include "alps/special.hpp"

#include <cmath>

namespace alps {

GaussianTarget::GaussianTarget(Vector mu, Matrix sigma) : mu_(std::move(mu)), sigma_(std::move(sigma)) {
  if (mu_.size() == 0) throw ConfigError("gaussian: empty mean");
  if (sigma_.rows() != mu_.size() || sigma_.cols() != mu_.size()) {
    throw ConfigError("gaussian: covariance shape does not match mean");
  }
  auto chol = cholesky(sigma_);
  if (chol.failed_pivot) throw ConfigError("gaussian: covariance is not positive definite");
  chol_ = std::move(chol.lower);
  log_det_ = log_det_from_cholesky(chol_);
  precision_ = inverse_from_cholesky(chol_);
}

double GaussianTarget::log_density(const Vector& x) const {
  return gaussian_log_pdf(x, mu_, chol_, log_det_);
}

Vector GaussianTarget::gradient(const Vector& x) const { return -precision_ * (x - mu_); }

Matrix GaussianTarget::hessian(const Vector&) const { return -precision_; }

GaussianMixtureTarget::GaussianMixtureTarget(std::vector<GaussianComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw ConfigError("gaussian_mixture: no components");
  const Eigen::Index d = components_.front().mu.size();
  if (d == 0) throw ConfigError("gaussian_mixture: empty mean");
  for (const auto& c : components_) {
    if (!(c.weight > 0.0)) throw ConfigError("gaussian_mixture: weights must be positive");
    if (c.mu.size() != d || c.sigma.rows() != d || c.sigma.cols() != d) {
      throw ConfigError("gaussian_mixture: component shapes disagree");
    }
    auto chol = cholesky(c.sigma);
    if (chol.failed_pivot) throw ConfigError("gaussian_mixture: covariance is not positive definite");
    log_det_.push_back(log_det_from_cholesky(chol.lower));
    chol_.push_back(std::move(chol.lower));
    log_w_.push_back(std::log(c.weight));
  }
  const double norm = logsumexp(log_w_);
  for (std::size_t j = 0; j < log_w_.size(); ++j) {
    log_w_[j] -= norm;
    components_[j].weight = std::exp(log_w_[j]);
  }
}

std::vector<double> GaussianMixtureTarget::component_terms(const Vector& x) const {
  std::vector<double> t(components_.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    t[j] = log_w_[j] + gaussian_log_pdf(x, components_[j].mu, chol_[j], log_det_[j]);
  }
  return t;
}

double GaussianMixtureTarget::log_density(const Vector& x) const {
  return logsumexp(component_terms(x));
}

Vector GaussianMixtureTarget::gradient(const Vector& x) const {
  const auto t = component_terms(x);
  const double total = logsumexp(t);
  Vector g = Vector::Zero(x.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double r = std::exp(t[j] - total);
    if (r == 0.0) continue;
    const Vector diff = x - components_[j].mu;
    const Vector a = chol_[j].triangularView<Eigen::Lower>().solve(diff);
    g -= r * chol_[j].transpose().triangularView<Eigen::Upper>().solve(a);
  }
  return g;
}

}  // namespace alps
