#pragma once

#include "alps/linalg.hpp"
#include "alps/mode_registry.hpp"
#include "alps/target.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace alps {

using RegistrySnapshot = std::shared_ptr<const ModeRegistry>;

/// A density at one inverse temperature, as seen by the MCMC kernels.
class TemperedDensity {
 public:
  virtual ~TemperedDensity() = default;
  virtual double beta() const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual double log_density(const Vector& x) const = 0;
  /// Mode information for preconditioned proposals; null when unavailable.
  virtual const ModeRegistry* registry() const { return nullptr; }
};

/// Plain power tempering beta * log pi(x). Used by the hot chain and PT.
class PowerTarget final : public TemperedDensity {
 public:
  PowerTarget(TargetPtr base, double beta);
  double beta() const override { return beta_; }
  Eigen::Index dim() const override { return base_->dim(); }
  double log_density(const Vector& x) const override;

 private:
  TargetPtr base_;
  double beta_;
};

/// Mode allocations of a point at temperature beta and at beta = 1.
struct Allocation {
  std::size_t at_beta = 0;
  std::size_t at_one = 0;
  double quad_at_beta = 0.0;  // (x - mu)^T Sigma^{-1} (x - mu) for at_beta, untempered
};

/// argmax_j  log w_j + log N(x | mu_j, Sigma_j / beta); ties go to the
/// lowest index. Throws NoModesError on an empty registry.
std::size_t allocate_mode(const Vector& x, double beta, const ModeRegistry& registry);

/// Both allocations from one pass over the modes.
Allocation allocate_pair(const Vector& x, double beta, const ModeRegistry& registry);

/// Hessian-adjusted tempered target.
///
/// Where the allocations at beta and at 1 agree, the log-density is
/// log pi(mu_A) + beta (log pi(x) - log pi(mu_A)), which keeps every mode
/// height fixed across temperatures. Elsewhere it falls back to the
/// Gaussian G(x, beta) = pi(mu_A) (2 pi)^{d/2} |Sigma_A|^{1/2}
/// N(x | mu_A, Sigma_A / beta) beta^{-d/2}, i.e. log pi(mu_A) - beta q / 2.
/// At beta == 1 the base log-density is returned unchanged.
class HatTarget : public TemperedDensity {
 public:
  HatTarget(TargetPtr base, RegistrySnapshot registry, double beta);

  double beta() const override { return beta_; }
  Eigen::Index dim() const override { return base_->dim(); }
  double log_density(const Vector& x) const override;
  const ModeRegistry* registry() const override { return registry_.get(); }

  /// Log-density given an allocation already computed for x.
  double log_density(const Vector& x, const Allocation& alloc) const;

  std::uint64_t registry_version() const { return registry_->version(); }
  const TargetDensity& base() const { return *base_; }
  const RegistrySnapshot& snapshot() const { return registry_; }

 private:
  TargetPtr base_;
  RegistrySnapshot registry_;
  double beta_;
};

/// HAT target set to zero outside {(x - mu_A)^T Sigma_A^{-1} (x - mu_A) < q},
/// A the allocation at beta, Sigma_A untempered.
class TruncatedHatTarget final : public TemperedDensity {
 public:
  TruncatedHatTarget(HatTarget inner, double q);

  double beta() const override { return inner_.beta(); }
  Eigen::Index dim() const override { return inner_.dim(); }
  double log_density(const Vector& x) const override;
  const ModeRegistry* registry() const override { return inner_.registry(); }

  double quantile() const { return q_; }
  const HatTarget& inner() const { return inner_; }

 private:
  HatTarget inner_;
  double q_;
};

/// Truncation level from a chi-squared quantile at the given probability.
double truncation_level(double probability, Eigen::Index dim);

// ---------------------------------------------------------------------------
// Component-wise (tempered) rescaled mixtures, used to check weight
// preservation of the tempering rule in isolation from any sampler.

/// Shape g of every component, with g maximised at 0.
struct ComponentShape {
  enum class Kind { gaussian, student_t, custom };
  Kind kind = Kind::gaussian;
  double dof = 0.0;  // student_t only
  /// custom only: log g on R^d. Its tempered normaliser is unknown.
  std::function<double(const Vector&)> custom_log_g;

  double log_g(const Vector& s) const;
  /// log of the integral over R^d of g(s)^beta ds. Throws ConfigError for
  /// custom shapes.
  double log_tempered_integral(double beta, Eigen::Index dim) const;
};

struct CtrmdComponent {
  double weight = 0.0;
  Vector mu;
  Matrix sigma;
};

class CtrmdSpec {
 public:
  CtrmdSpec(std::vector<CtrmdComponent> components, ComponentShape shape);

  enum class Tempering { power, weight_preserving };

  std::size_t size() const { return components_.size(); }
  Eigen::Index dim() const { return components_.front().mu.size(); }

  /// log a_j(x) = log w_j - 0.5 log|Sigma_j| + log g(s_j(x)).
  double log_component(std::size_t j, const Vector& x) const;

  /// Tempered component masses W_(j,beta), normalised to sum to one:
  /// power: w_j^beta |Sigma_j|^{(1-beta)/2}; weight_preserving: w_j.
  std::vector<double> tempered_weights(double beta, Tempering mode) const;

  /// log sum_j W_(j,beta) g(s_j(x))^beta / int g(s_j(x))^beta dx.
  double log_density(const Vector& x, double beta, Tempering mode) const;

  /// The unnormalised tempered components from first principles:
  /// power: a_j(x)^beta; weight_preserving: a_j(x)^beta a_j(mu_j)^{1-beta}.
  double log_tempered_component(std::size_t j, const Vector& x, double beta,
                                Tempering mode) const;

 private:
  std::vector<CtrmdComponent> components_;
  std::vector<Matrix> chol_;
  std::vector<double> log_det_;
  ComponentShape shape_;
};

}  // namespace alps
