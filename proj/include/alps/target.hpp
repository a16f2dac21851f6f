#pragma once

#include "alps/linalg.hpp"

#include <functional>
#include <memory>
#include <string>

namespace alps {

/// An unnormalised log-density on R^d. Evaluation must be pure: samplers
/// call it concurrently from several levels.
class TargetDensity {
 public:
  virtual ~TargetDensity() = default;

  virtual Eigen::Index dim() const = 0;
  /// May return -inf.
  virtual double log_density(const Vector& x) const = 0;

  virtual bool has_gradient() const { return false; }
  virtual Vector gradient(const Vector& x) const;

  virtual bool has_hessian() const { return false; }
  virtual Matrix hessian(const Vector& x) const;

  virtual std::string name() const { return "target"; }
};

using TargetPtr = std::shared_ptr<const TargetDensity>;

/// Adapter over plain callables (used by the Python bindings and tests).
class FunctionTarget final : public TargetDensity {
 public:
  using LogDensity = std::function<double(const Vector&)>;
  using Gradient = std::function<Vector(const Vector&)>;
  using Hessian = std::function<Matrix(const Vector&)>;

  FunctionTarget(Eigen::Index dim, LogDensity f, Gradient g = {}, Hessian h = {},
                 std::string name = "function");

  Eigen::Index dim() const override { return dim_; }
  double log_density(const Vector& x) const override { return f_(x); }
  bool has_gradient() const override { return static_cast<bool>(g_); }
  Vector gradient(const Vector& x) const override;
  bool has_hessian() const override { return static_cast<bool>(h_); }
  Matrix hessian(const Vector& x) const override;
  std::string name() const override { return name_; }

 private:
  Eigen::Index dim_;
  LogDensity f_;
  Gradient g_;
  Hessian h_;
  std::string name_;
};

/// Central-difference gradient with per-coordinate step
/// h_i = step * max(1, |x_i|).
Vector finite_difference_gradient(const TargetDensity& target, const Vector& x,
                                  double step);

}  // namespace alps
