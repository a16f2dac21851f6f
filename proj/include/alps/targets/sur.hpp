#pragma once

#include "alps/linalg.hpp"
#include "alps/target.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace alps {

/// A system of M regressions y_m = X_m theta_m + e_m sharing N observations
/// and J covariates per equation.
struct SurData {
  std::vector<std::string> labels;  // one per equation
  std::vector<int> periods;         // shared observation index (years)
  std::vector<Vector> y;            // M vectors of length N
  std::vector<Matrix> x;            // M matrices N x J

  Eigen::Index equations() const { return static_cast<Eigen::Index>(y.size()); }
  Eigen::Index observations() const { return y.empty() ? 0 : y.front().size(); }
  Eigen::Index covariates() const { return x.empty() ? 0 : x.front().cols(); }
  Eigen::Index dim() const { return equations() * covariates(); }

  /// Throws ConfigError when block shapes disagree.
  void validate() const;
};

struct SurCsvOptions {
  std::optional<int> first_year;
  std::optional<int> last_year;
  /// Equations to keep, in this order. Empty keeps every firm in order of
  /// first appearance.
  std::vector<std::string> firms;
  /// CRC-32 of the file bytes, checked before parsing when set.
  std::optional<std::uint32_t> expected_crc32;
};

/// Reads a panel with header columns firm, year, invest, value, capital
/// (any order, extra columns ignored). Each firm becomes one equation with
/// response invest and design columns (1, value, capital).
SurData load_sur_csv(const std::filesystem::path& path, const SurCsvOptions& options = {});

std::uint32_t file_crc32(const std::filesystem::path& path);

/// CRC-32 of the bundled data/grunfeld.csv.
inline constexpr std::uint32_t kGrunfeldCrc32 = 0xa8263625u;

/// Bundled Grunfeld panel location; the ALPS_DATA_DIR environment variable
/// overrides the build-time default.
std::filesystem::path default_data_dir();

/// Five firms (General Motors, Chrysler, General Electric, Westinghouse,
/// US Steel) over 1935-1949 from the bundled file, checksum verified.
SurData grunfeld_five_firms(const std::filesystem::path& csv = default_data_dir() / "grunfeld.csv");

/// Residual matrix, M x N, row m = y_m - X_m theta_m.
Matrix sur_residuals(const Vector& theta, const SurData& data);

/// (1/N) R R^T.
Matrix sur_sigma_hat(const Vector& theta, const SurData& data);

/// Per-equation ordinary least squares.
Vector sur_ols(const SurData& data);

/// Generalised least squares for a given error covariance, assembled block
/// by block from the entries of sigma^{-1}. Throws NumericalError
/// "unidentifiable system" when the normal matrix is singular.
Vector sur_gls_theta(const Matrix& sigma, const SurData& data);

enum class ConvergenceRule {
  max_abs,      // max_i |theta_i - theta_i_prev| < tol
  relative_l2,  // ||theta - theta_prev|| / ||theta_prev|| < tol
};

struct ZellnerOptions {
  double tol = 1e-6;
  int max_iter = 1000;
  ConvergenceRule rule = ConvergenceRule::max_abs;
};

struct ZellnerResult {
  Vector theta;
  Matrix sigma;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loglik;  // profile log-likelihood after each iteration
  std::vector<Vector> path;    // theta after each iteration, OLS first
};

/// Alternates sur_sigma_hat and sur_gls_theta from the OLS estimate.
ZellnerResult zellner_iterate(const SurData& data, const ZellnerOptions& options = {});

/// -N log(2 pi) - (N/2) log|sigma_hat(theta)| - N; -inf when sigma_hat is
/// not positive definite.
double sur_profile_loglik(const Vector& theta, const SurData& data);

/// Profile log-likelihood as a flat-prior target over theta.
class SurProfileTarget final : public TargetDensity {
 public:
  explicit SurProfileTarget(SurData data);

  Eigen::Index dim() const override { return data_.dim(); }
  double log_density(const Vector& theta) const override;
  bool has_gradient() const override { return true; }
  Vector gradient(const Vector& theta) const override;
  bool has_hessian() const override { return true; }
  Matrix hessian(const Vector& theta) const override;
  std::string name() const override { return "sur_profile"; }

  const SurData& data() const { return data_; }

 private:
  SurData data_;
};

}  // namespace alps
