#include "alps/targets/iid_product.hpp"

#include "alps/error.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <sstream>
#include <vector>

namespace alps {

IidProductTarget::IidProductTarget(ScalarShape h, Eigen::Index dim, double beta)
    : h_(std::move(h)), dim_(dim), beta_(beta) {
  if (!h_) throw ConfigError("iid_product: empty shape");
  if (dim <= 0) throw ConfigError("iid_product: dimension must be positive");
  if (!(beta > 0.0)) throw ConfigError("iid_product: beta must be positive");
}

double IidProductTarget::log_density(const Vector& x) const {
  double acc = 0.0;
  for (double v : x) acc += h_(v);
  return beta_ * acc;
}

void check_unique_maximum_at_zero(const ScalarShape& h, double half_width, int points) {
  if (std::abs(h(0.0)) > 1e-12) throw ConfigError("shape: h(0) must be 0");
  const double step = 2.0 * half_width / (points - 1);
  auto fail = [](double x, double v) {
    std::ostringstream msg;
    msg << "shape: h(" << x << ") = " << v << " is not below h(0) = 0";
    throw ConfigError(msg.str());
  };
  std::vector<double> xs(points), vs(points);
  for (int i = 0; i < points; ++i) {
    xs[i] = -half_width + i * step;
    vs[i] = std::abs(xs[i]) < 0.5 * step ? 0.0 : h(xs[i]);
    if (std::abs(xs[i]) >= 0.5 * step && !(vs[i] < 0.0)) fail(xs[i], vs[i]);
  }
  // Competing maxima can fall between nodes.
  for (int i = 1; i + 1 < points; ++i) {
    if (std::abs(xs[i]) < 1.5 * step || vs[i] < vs[i - 1] || vs[i] < vs[i + 1]) continue;
    const auto [x, neg] = boost::math::tools::brent_find_minima([&](double t) { return -h(t); }, xs[i - 1], xs[i + 1], 52);
    if (!(-neg < -1e-9)) fail(x, -neg);
  }
}

}  // namespace alps
