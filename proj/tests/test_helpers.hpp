#pragma once

#include "alps/linalg.hpp"
#include "alps/mode_registry.hpp"
#include "alps/rng.hpp"

#include <cmath>
#include <numbers>

namespace alps::test {

inline Matrix diag(std::initializer_list<double> v) {
  Vector d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d[i++] = x;
  return d.asDiagonal();
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline ModeInfo mode1d(double mu, double sigma2, double log_pi) {
  return ModeInfo::from_covariance(vec({mu}), Matrix::Constant(1, 1, sigma2), log_pi);
}

inline Matrix random_spd(Eigen::Index d, Stream& rng) {
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = rng.normal();
  return a * a.transpose() / static_cast<double>(d) + 0.5 * Matrix::Identity(d, d);
}

inline Vector random_vector(Eigen::Index d, Stream& rng, double scale = 1.0) {
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = scale * rng.normal();
  return v;
}

inline double std_normal_log_pdf(double x) { return -0.5 * x * x - 0.5 * std::log(2 * std::numbers::pi); }

}  // namespace alps::test
