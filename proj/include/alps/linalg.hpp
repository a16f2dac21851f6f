#pragma once

#include <Eigen/Dense>

#include <optional>

namespace alps {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Lower Cholesky factor of a symmetric positive-definite matrix, or the
/// index of the first failing pivot.
struct CholeskyResult {
  Matrix lower;
  std::optional<Eigen::Index> failed_pivot;
};

CholeskyResult cholesky(const Matrix& a);

/// 2 * sum(log(diag(L))).
double log_det_from_cholesky(const Matrix& lower);

/// (x - mu)^T Sigma^{-1} (x - mu) with Sigma = L L^T, by a forward solve.
double mahalanobis_squared(const Matrix& lower, const Vector& diff);

/// log N(x | mu, Sigma / beta) with Sigma = L L^T and log|Sigma| precomputed.
double gaussian_log_pdf(const Vector& x, const Vector& mu, const Matrix& lower,
                        double log_det_sigma, double beta = 1.0);

/// Gaussian log-density from an already computed squared Mahalanobis
/// distance under Sigma (untempered).
double gaussian_log_pdf_from_quad(double quad, Eigen::Index dim,
                                  double log_det_sigma, double beta = 1.0);

/// Symmetric inverse of A = L L^T, via two triangular solves.
Matrix inverse_from_cholesky(const Matrix& lower);

}  // namespace alps
