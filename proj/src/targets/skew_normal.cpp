#include "alps/targets/skew_normal.hpp"

#include "alps/error.hpp"
#include "alps/special.hpp"

#include <cmath>
#include <numbers>

namespace alps {

namespace {

double log_skew_normal(double z, double alpha) {
  return std::numbers::ln2 + log_normal_pdf(z) + log_normal_cdf(alpha * z);
}

}  // namespace

SkewNormalMixtureTarget::SkewNormalMixtureTarget(double alpha, std::vector<Vector> locations,
                                                 std::vector<double> scales)
    : alpha_(alpha), locations_(std::move(locations)), scales_(std::move(scales)) {
  if (locations_.empty()) throw ConfigError("skew_normal_mixture: no components");
  if (locations_.size() != scales_.size()) {
    throw ConfigError("skew_normal_mixture: need one scale per location");
  }
  const Eigen::Index d = locations_.front().size();
  if (d == 0) throw ConfigError("skew_normal_mixture: empty location");
  for (std::size_t k = 0; k < locations_.size(); ++k) {
    if (locations_[k].size() != d) throw ConfigError("skew_normal_mixture: location sizes differ");
    if (!(scales_[k] > 0.0)) throw ConfigError("skew_normal_mixture: scales must be positive");
  }
}

double SkewNormalMixtureTarget::log_component(std::size_t k, const Vector& x) const {
  const Vector& mu = locations_.at(k);
  const double w = scales_[k];
  double acc = -static_cast<double>(x.size()) * std::log(w);
  for (Eigen::Index j = 0; j < x.size(); ++j) acc += log_skew_normal((x[j] - mu[j]) / w, alpha_);
  return acc;
}

double SkewNormalMixtureTarget::log_density(const Vector& x) const {
  std::vector<double> t(locations_.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = log_component(k, x);
  return logsumexp(t) - std::log(static_cast<double>(t.size()));
}

Vector SkewNormalMixtureTarget::gradient(const Vector& x) const {
  std::vector<double> t(locations_.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = log_component(k, x);
  const double total = logsumexp(t);
  Vector g = Vector::Zero(x.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double r = std::exp(t[k] - total);
    if (r == 0.0) continue;
    const double w = scales_[k];
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double z = (x[j] - locations_[k][j]) / w;
      g[j] += r * (-z + alpha_ * normal_hazard(alpha_ * z)) / w;
    }
  }
  return g;
}

std::size_t SkewNormalMixtureTarget::nearest_component(const Vector& x) const {
  std::size_t best = 0;
  double best_val = log_component(0, x);
  for (std::size_t k = 1; k < locations_.size(); ++k) {
    const double v = log_component(k, x);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  return best;
}

Vector SkewNormalMixtureTarget::component_mode(std::size_t k) const {
  return locations_.at(k).array() + scales_[k] * skew_normal_mode(alpha_);
}

SkewNormalMixtureTarget make_four_mode_benchmark(Eigen::Index dim, double alpha) {
  if (dim < 2 || dim % 2 != 0) throw ConfigError("four-mode benchmark needs an even dimension >= 2");
  const Vector m1 = Vector::Constant(dim, 20.0);
  Vector m3(dim);
  m3.head(dim / 2).setConstant(-10.0);
  m3.tail(dim / 2).setConstant(10.0);
  return SkewNormalMixtureTarget(alpha, {m1, -m1, m3, -m3}, {1.0, 1.0, 2.0, 2.0});
}

double skew_normal_mode(double alpha) {
  // Root of -z + alpha * hazard(alpha z); the sign matches alpha.
  auto score = [alpha](double z) { return -z + alpha * normal_hazard(alpha * z); };
  double lo = std::min(0.0, alpha >= 0 ? 0.0 : -1.0);
  double hi = std::max(0.0, alpha >= 0 ? 1.0 : 0.0);
  while (score(hi) > 0.0) hi *= 2.0;
  while (score(lo) < 0.0) lo *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (score(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

CenteredSkewNormal::CenteredSkewNormal(double alpha)
    : alpha_(alpha), mode_(skew_normal_mode(alpha)), log_f_mode_(log_skew_normal(mode_, alpha)) {}

double CenteredSkewNormal::operator()(double x) const {
  return log_skew_normal(x + mode_, alpha_) - log_f_mode_;
}

}  // namespace alps
