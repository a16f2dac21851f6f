#include "alps/hat_target.hpp"

#include "alps/error.hpp"
#include "alps/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace alps {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

PowerTarget::PowerTarget(TargetPtr base, double beta) : base_(std::move(base)), beta_(beta) {
  if (!base_) throw ConfigError("PowerTarget: null base");
  if (!(beta > 0.0)) throw ConfigError("PowerTarget: beta must be positive");
}

double PowerTarget::log_density(const Vector& x) const {
  const double lp = base_->log_density(x);
  return std::isfinite(lp) ? beta_ * lp : lp;
}

Allocation allocate_pair(const Vector& x, double beta, const ModeRegistry& registry) {
  if (registry.empty()) throw NoModesError();
  const auto& modes = registry.modes();
  const auto& lw = registry.log_weights();
  // The d/2 log(beta) and 2 pi terms are common to all modes and dropped.
  Allocation best;
  double score_beta = kNegInf;
  double score_one = kNegInf;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const double quad = mahalanobis_squared(modes[j].sigma_chol, x - modes[j].mu);
    const double common = lw[j] - 0.5 * modes[j].log_det_sigma;
    const double sb = common - 0.5 * beta * quad;
    const double s1 = common - 0.5 * quad;
    if (j == 0 || sb > score_beta) {
      score_beta = sb;
      best.at_beta = j;
      best.quad_at_beta = quad;
    }
    if (j == 0 || s1 > score_one) {
      score_one = s1;
      best.at_one = j;
    }
  }
  return best;
}

std::size_t allocate_mode(const Vector& x, double beta, const ModeRegistry& registry) {
  return allocate_pair(x, beta, registry).at_beta;
}

HatTarget::HatTarget(TargetPtr base, RegistrySnapshot registry, double beta)
    : base_(std::move(base)), registry_(std::move(registry)), beta_(beta) {
  if (!base_ || !registry_) throw ConfigError("HatTarget: null base or registry");
  if (!(beta > 0.0)) throw ConfigError("HatTarget: beta must be positive");
  if (registry_->dim() != base_->dim()) throw ConfigError("HatTarget: dimension mismatch");
}

double HatTarget::log_density(const Vector& x) const {
  if (beta_ == 1.0) return base_->log_density(x);
  return log_density(x, allocate_pair(x, beta_, *registry_));
}

double HatTarget::log_density(const Vector& x, const Allocation& alloc) const {
  if (beta_ == 1.0) return base_->log_density(x);
  const ModeInfo& m = registry_->mode(alloc.at_beta);
  if (alloc.at_beta == alloc.at_one) {
    const double lp = base_->log_density(x);
    if (!std::isfinite(lp)) return lp;
    // Written as an offset from the mode height so that x = mu gives
    // log pi(mu) exactly.
    return m.log_pi_at_mode + beta_ * (lp - m.log_pi_at_mode);
  }
  // log G(x, beta): the (2 pi)^{d/2}, |Sigma|^{1/2} and beta^{-d/2} factors
  // cancel the Gaussian normaliser exactly.
  return m.log_pi_at_mode - 0.5 * beta_ * alloc.quad_at_beta;
}

TruncatedHatTarget::TruncatedHatTarget(HatTarget inner, double q)
    : inner_(std::move(inner)), q_(q) {
  if (!(q > 0.0)) throw ConfigError("TruncatedHatTarget: q must be positive");
}

double TruncatedHatTarget::log_density(const Vector& x) const {
  const Allocation alloc = allocate_pair(x, inner_.beta(), *inner_.registry());
  if (!(alloc.quad_at_beta < q_)) return kNegInf;
  return inner_.log_density(x, alloc);
}

double truncation_level(double probability, Eigen::Index dim) {
  return chi_squared_quantile(probability, static_cast<double>(dim));
}

// ---------------------------------------------------------------------------

double ComponentShape::log_g(const Vector& s) const {
  switch (kind) {
    case Kind::gaussian: {
      double acc = 0.0;
      for (double v : s) acc += log_normal_pdf(v);
      return acc;
    }
    case Kind::student_t: {
      const double c = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
                       0.5 * std::log(dof * std::numbers::pi);
      double acc = 0.0;
      for (double v : s) acc += c - 0.5 * (dof + 1.0) * std::log1p(v * v / dof);
      return acc;
    }
    case Kind::custom:
      return custom_log_g(s);
  }
  return kNegInf;
}

double ComponentShape::log_tempered_integral(double beta, Eigen::Index dim) const {
  const double d = static_cast<double>(dim);
  switch (kind) {
    case Kind::gaussian:
      // int phi(s)^beta ds = (2 pi)^{(1 - beta)/2} beta^{-1/2}
      return d * (0.5 * (1.0 - beta) * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(beta));
    case Kind::student_t: {
      const double a = 0.5 * beta * (dof + 1.0) - 0.5;
      if (!(a > 0.0)) throw ConfigError("student_t shape: tempered density not integrable");
      const double log_c = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
                           0.5 * std::log(dof * std::numbers::pi);
      const double log_beta_fn = std::lgamma(0.5) + std::lgamma(a) - std::lgamma(0.5 + a);
      return d * (beta * log_c + 0.5 * std::log(dof) + log_beta_fn);
    }
    case Kind::custom:
      break;
  }
  throw ConfigError("component shape has no closed-form tempered normaliser");
}

CtrmdSpec::CtrmdSpec(std::vector<CtrmdComponent> components, ComponentShape shape)
    : components_(std::move(components)), shape_(std::move(shape)) {
  if (components_.empty()) throw ConfigError("CTRMD: no components");
  if (shape_.kind == ComponentShape::Kind::student_t && !(shape_.dof > 0.0)) {
    throw ConfigError("CTRMD: student_t shape needs dof > 0");
  }
  if (shape_.kind == ComponentShape::Kind::custom && !shape_.custom_log_g) {
    throw ConfigError("CTRMD: custom shape without log g");
  }
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0)) throw ConfigError("CTRMD: weights must be positive");
    if (c.mu.size() != components_.front().mu.size()) {
      throw ConfigError("CTRMD: component dimension mismatch");
    }
    total += c.weight;
    auto chol = cholesky(c.sigma);
    if (chol.failed_pivot) throw ConfigError("CTRMD: sigma must be positive definite");
    log_det_.push_back(log_det_from_cholesky(chol.lower));
    chol_.push_back(std::move(chol.lower));
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("CTRMD: weights must sum to one");
}

double CtrmdSpec::log_component(std::size_t j, const Vector& x) const {
  const auto& c = components_.at(j);
  const Vector s = chol_[j].triangularView<Eigen::Lower>().solve(x - c.mu);
  return std::log(c.weight) - 0.5 * log_det_[j] + shape_.log_g(s);
}

std::vector<double> CtrmdSpec::tempered_weights(double beta, Tempering mode) const {
  std::vector<double> lw(components_.size());
  for (std::size_t j = 0; j < lw.size(); ++j) {
    const double lwj = std::log(components_[j].weight);
    lw[j] = mode == Tempering::power ? beta * lwj + 0.5 * (1.0 - beta) * log_det_[j] : lwj;
  }
  const double norm = logsumexp(lw);
  for (double& v : lw) v = std::exp(v - norm);
  return lw;
}

double CtrmdSpec::log_density(const Vector& x, double beta, Tempering mode) const {
  const auto w = tempered_weights(beta, mode);
  const double log_int = shape_.log_tempered_integral(beta, dim());
  std::vector<double> terms(components_.size());
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const Vector s = chol_[j].triangularView<Eigen::Lower>().solve(x - components_[j].mu);
    terms[j] = std::log(w[j]) + beta * shape_.log_g(s) - (0.5 * log_det_[j] + log_int);
  }
  return logsumexp(terms);
}

double CtrmdSpec::log_tempered_component(std::size_t j, const Vector& x, double beta,
                                         Tempering mode) const {
  const double la = log_component(j, x);
  if (mode == Tempering::power) return beta * la;
  return beta * la + (1.0 - beta) * log_component(j, components_.at(j).mu);
}

}  // namespace alps
