#pragma once

#include "alps/linalg.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace alps {

/// A discovered local maximum of log pi with its Laplace covariance
/// Sigma = -[Hessian of log pi]^{-1}.
struct ModeInfo {
  Vector mu;
  Matrix sigma;
  Matrix sigma_chol;  // lower triangular, sigma = L L^T
  double log_pi_at_mode = 0.0;
  double log_det_sigma = 0.0;

  /// Factorises `sigma` and fills the derived fields. Throws
  /// IndefiniteHessian when sigma is not positive definite.
  static ModeInfo from_covariance(Vector mu, Matrix sigma, double log_pi_at_mode);

  Eigen::Index dim() const noexcept { return mu.size(); }
};

/// Sigma, its Cholesky factor and log-determinant from a Hessian of log pi.
struct LaplaceCovariance {
  Matrix sigma;
  Matrix sigma_chol;
  double log_det_sigma = 0.0;
  bool jittered = false;
};

/// Sigma = -hess^{-1}, inverted through the Cholesky factor of -hess.
///
/// If -hess fails to factorise, one retry is made with -hess + eps I where
/// eps = 1e-10 * max|diag(hess)|. A second failure throws IndefiniteHessian
/// carrying the failing pivot.
LaplaceCovariance covariance_from_hessian(const Matrix& hess);

/// Normalised approximate mode weights w_j ∝ pi(mu_j) |Sigma_j|^{1/2}, in
/// log space. Throws ConfigError("no modes") on an empty list.
std::vector<double> approximate_log_weights(std::span<const ModeInfo> modes);

/// exp of approximate_log_weights.
std::vector<double> approximate_weights(std::span<const ModeInfo> modes);

/// d^{-1} max of the two squared Mahalanobis distances between the mode
/// points, one under each mode's covariance.
double pseudo_distance(const ModeInfo& a, const ModeInfo& b);

/// Default deduplication tolerance 1 + sqrt(2/d).
double default_dedup_tolerance(Eigen::Index dim);

/// Append-only collection of discovered modes with their weights.
///
/// Indices never change once assigned. The version counter increases by one
/// on every successful insertion, so a sampler holding a copy can tell that
/// its targets are stale.
class ModeRegistry {
 public:
  explicit ModeRegistry(Eigen::Index dim, double tol = -1.0);

  Eigen::Index dim() const noexcept { return dim_; }
  double tol() const noexcept { return tol_; }
  std::uint64_t version() const noexcept { return version_; }
  std::size_t size() const noexcept { return modes_.size(); }
  bool empty() const noexcept { return modes_.empty(); }

  const std::vector<ModeInfo>& modes() const noexcept { return modes_; }
  const ModeInfo& mode(std::size_t j) const { return modes_.at(j); }
  const std::vector<double>& log_weights() const noexcept { return log_weights_; }

  /// Smallest pseudo-distance from `candidate` to a registered mode
  /// (+inf for an empty registry).
  double min_pseudo_distance(const ModeInfo& candidate) const;

  /// Appends `candidate` when it is farther than tol from every registered
  /// mode and recomputes all weights. Returns whether it was inserted.
  bool try_insert(const ModeInfo& candidate);

  /// {version, dim, tol, modes: [{mu, sigma, log_pi_at_mode}]}.
  nlohmann::json to_json() const;
  /// Inverse of to_json; weights are recomputed.
  static ModeRegistry from_json(const nlohmann::json& j);

 private:
  Eigen::Index dim_;
  double tol_;
  std::uint64_t version_ = 0;
  std::vector<ModeInfo> modes_;
  std::vector<double> log_weights_;
};

}  // namespace alps
