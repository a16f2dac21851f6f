#include "alps/mode_registry.hpp"

#include "alps/error.hpp"
#include "alps/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace alps {

ModeInfo ModeInfo::from_covariance(Vector mu, Matrix sigma, double log_pi_at_mode) {
  if (sigma.rows() != mu.size() || sigma.cols() != mu.size()) {
    throw ConfigError("ModeInfo: sigma must be d x d with d = len(mu)");
  }
  const double scale = std::max(sigma.cwiseAbs().maxCoeff(), 1e-300);
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw ConfigError("ModeInfo: sigma is not symmetric");
  }
  sigma = 0.5 * (sigma + sigma.transpose());
  auto chol = cholesky(sigma);
  if (chol.failed_pivot) {
    throw IndefiniteHessian(static_cast<std::size_t>(*chol.failed_pivot),
                            "ModeInfo: sigma is not positive definite (pivot " +
                                std::to_string(*chol.failed_pivot) + ")");
  }
  ModeInfo m;
  m.mu = std::move(mu);
  m.sigma = std::move(sigma);
  m.sigma_chol = std::move(chol.lower);
  m.log_pi_at_mode = log_pi_at_mode;
  m.log_det_sigma = log_det_from_cholesky(m.sigma_chol);
  return m;
}

LaplaceCovariance covariance_from_hessian(const Matrix& hess) {
  if (hess.rows() != hess.cols()) throw ConfigError("Hessian must be square");
  if (!hess.allFinite()) {
    throw IndefiniteHessian(0, "not a local maximum / indefinite Hessian: non-finite entries");
  }
  Matrix precision = -0.5 * (hess + hess.transpose());
  auto chol = cholesky(precision);
  bool jittered = false;
  if (chol.failed_pivot) {
    const double eps = 1e-10 * hess.diagonal().cwiseAbs().maxCoeff();
    precision.diagonal().array() += eps;
    auto retry = cholesky(precision);
    if (retry.failed_pivot) {
      throw IndefiniteHessian(static_cast<std::size_t>(*retry.failed_pivot),
                              "not a local maximum / indefinite Hessian (pivot " +
                                  std::to_string(*retry.failed_pivot) + ")");
    }
    chol = std::move(retry);
    jittered = true;
  }
  LaplaceCovariance out;
  out.sigma = inverse_from_cholesky(chol.lower);
  auto sigma_chol = cholesky(out.sigma);
  if (sigma_chol.failed_pivot) {
    // Only reachable when -hess is so ill-conditioned that its inverse loses
    // definiteness in floating point.
    throw IndefiniteHessian(static_cast<std::size_t>(*sigma_chol.failed_pivot),
                            "not a local maximum / indefinite Hessian: inverse lost definiteness");
  }
  out.sigma_chol = std::move(sigma_chol.lower);
  out.log_det_sigma = log_det_from_cholesky(out.sigma_chol);
  out.jittered = jittered;
  return out;
}

std::vector<double> approximate_log_weights(std::span<const ModeInfo> modes) {
  if (modes.empty()) throw ConfigError("no modes");
  std::vector<double> lw(modes.size());
  std::transform(modes.begin(), modes.end(), lw.begin(), [](const ModeInfo& m) {
    return m.log_pi_at_mode + 0.5 * m.log_det_sigma;
  });
  const double norm = logsumexp(lw);
  for (double& w : lw) w -= norm;
  return lw;
}

std::vector<double> approximate_weights(std::span<const ModeInfo> modes) {
  auto w = approximate_log_weights(modes);
  for (double& x : w) x = std::exp(x);
  return w;
}

double pseudo_distance(const ModeInfo& a, const ModeInfo& b) {
  if (a.dim() != b.dim()) throw ConfigError("pseudo_distance: dimension mismatch");
  const Vector diff = a.mu - b.mu;
  const double qa = mahalanobis_squared(a.sigma_chol, diff);
  const double qb = mahalanobis_squared(b.sigma_chol, diff);
  return std::max(qa, qb) / static_cast<double>(a.dim());
}

double default_dedup_tolerance(Eigen::Index dim) {
  return 1.0 + std::sqrt(2.0 / static_cast<double>(dim));
}

ModeRegistry::ModeRegistry(Eigen::Index dim, double tol)
    : dim_(dim), tol_(tol > 0.0 ? tol : default_dedup_tolerance(dim)) {
  if (dim <= 0) throw ConfigError("ModeRegistry: dimension must be positive");
}

double ModeRegistry::min_pseudo_distance(const ModeInfo& candidate) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& m : modes_) best = std::min(best, pseudo_distance(m, candidate));
  return best;
}

bool ModeRegistry::try_insert(const ModeInfo& candidate) {
  if (candidate.dim() != dim_) throw ConfigError("try_insert: dimension mismatch");
  if (!(min_pseudo_distance(candidate) > tol_)) return false;
  modes_.push_back(candidate);
  log_weights_ = approximate_log_weights(modes_);
  ++version_;
  return true;
}

nlohmann::json ModeRegistry::to_json() const {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : modes_) {
    nlohmann::json sigma = nlohmann::json::array();
    for (Eigen::Index i = 0; i < dim_; ++i) {
      sigma.push_back(std::vector<double>(m.sigma.row(i).begin(), m.sigma.row(i).end()));
    }
    modes.push_back({{"mu", std::vector<double>(m.mu.begin(), m.mu.end())},
                     {"sigma", std::move(sigma)},
                     {"log_pi_at_mode", m.log_pi_at_mode}});
  }
  return {{"version", version_}, {"dim", dim_}, {"tol", tol_}, {"modes", std::move(modes)}};
}

ModeRegistry ModeRegistry::from_json(const nlohmann::json& j) {
  try {
    ModeRegistry reg(j.at("dim").get<Eigen::Index>(), j.at("tol").get<double>());
    for (const auto& m : j.at("modes")) {
      const auto mu_v = m.at("mu").get<std::vector<double>>();
      const auto rows = m.at("sigma").get<std::vector<std::vector<double>>>();
      const auto d = static_cast<Eigen::Index>(mu_v.size());
      if (d != reg.dim_ || static_cast<Eigen::Index>(rows.size()) != d) {
        throw ConfigError("registry JSON: mode dimension mismatch");
      }
      Matrix sigma(d, d);
      for (Eigen::Index i = 0; i < d; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != d) {
          throw ConfigError("registry JSON: sigma row length mismatch");
        }
        for (Eigen::Index k = 0; k < d; ++k) sigma(i, k) = rows[i][k];
      }
      reg.modes_.push_back(ModeInfo::from_covariance(
          Eigen::Map<const Vector>(mu_v.data(), d), std::move(sigma),
          m.at("log_pi_at_mode").get<double>()));
    }
    if (!reg.modes_.empty()) reg.log_weights_ = approximate_log_weights(reg.modes_);
    reg.version_ = j.value("version", static_cast<std::uint64_t>(reg.modes_.size()));
    return reg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("registry JSON: ") + e.what());
  }
}

}  // namespace alps
