#pragma once

#include "alps/target.hpp"

#include <functional>

namespace alps {

using ScalarShape = std::function<double(double)>;

/// beta * sum_i h(x_i) for a 1-d log-shape h with its maximum at 0.
class IidProductTarget final : public TargetDensity {
 public:
  IidProductTarget(ScalarShape h, Eigen::Index dim, double beta = 1.0);

  Eigen::Index dim() const override { return dim_; }
  double log_density(const Vector& x) const override;
  std::string name() const override { return "iid_product"; }

  double beta() const { return beta_; }
  const ScalarShape& shape() const { return h_; }

 private:
  ScalarShape h_;
  Eigen::Index dim_;
  double beta_;
};

/// Grid check that h(0) = 0 is the unique global maximum of h on
/// [-half_width, half_width]. Throws ConfigError naming the first grid point
/// where h(x) >= 0 away from the origin.
void check_unique_maximum_at_zero(const ScalarShape& h, double half_width = 20.0,
                                  int points = 40001);

}  // namespace alps
