#include "alps/linalg.hpp"

#include <cmath>
#include <numbers>

namespace alps {

CholeskyResult cholesky(const Matrix& a) {
  // Hand-rolled so the failing pivot can be reported; Eigen's LLT only
  // signals success or failure.
  const Eigen::Index n = a.rows();
  CholeskyResult out{Matrix::Zero(n, n), std::nullopt};
  Matrix& l = out.lower;
  for (Eigen::Index j = 0; j < n; ++j) {
    double diag = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(diag > 0.0) || !std::isfinite(diag)) {
      out.failed_pivot = j;
      return out;
    }
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
    }
  }
  return out;
}

double log_det_from_cholesky(const Matrix& lower) {
  return 2.0 * lower.diagonal().array().log().sum();
}

double mahalanobis_squared(const Matrix& lower, const Vector& diff) {
  return lower.triangularView<Eigen::Lower>().solve(diff).squaredNorm();
}

double gaussian_log_pdf_from_quad(double quad, Eigen::Index dim,
                                  double log_det_sigma, double beta) {
  const double d = static_cast<double>(dim);
  return -0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * log_det_sigma +
         0.5 * d * std::log(beta) - 0.5 * beta * quad;
}

double gaussian_log_pdf(const Vector& x, const Vector& mu, const Matrix& lower,
                        double log_det_sigma, double beta) {
  return gaussian_log_pdf_from_quad(mahalanobis_squared(lower, x - mu), x.size(),
                                    log_det_sigma, beta);
}

Matrix inverse_from_cholesky(const Matrix& lower) {
  const Eigen::Index n = lower.rows();
  Matrix linv = lower.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
  Matrix inv = linv.transpose() * linv;
  return 0.5 * (inv + inv.transpose());
}

}  // namespace alps
