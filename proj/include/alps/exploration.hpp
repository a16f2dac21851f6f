#pragma once

#include "alps/hat_target.hpp"
#include "alps/linalg.hpp"
#include "alps/mode_registry.hpp"
#include "alps/pa_chain.hpp"
#include "alps/target.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace alps {

struct OptimizerConfig {
  int max_iterations = 500;
  double gradient_tolerance = 1e-6;  // infinity norm of grad log pi
  double armijo = 1e-4;
  double shrink = 0.5;
  double finite_difference_step = 6.0554544523933395e-06;  // cbrt(machine epsilon)
  /// Seed the inverse-Hessian approximation with -H^{-1} when the target
  /// has an analytic Hessian that is negative definite at the start point.
  bool hessian_start = true;

  void validate() const;
};

struct OptimizeResult {
  Vector x;
  double log_density = -std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
  double gradient_norm = std::numeric_limits<double>::infinity();
};

/// BFGS ascent on log pi with backtracking Armijo line search. Uses the
/// analytic gradient when available, central differences otherwise. On a
/// line-search failure the best point so far is returned unconverged.
OptimizeResult local_optimize(const TargetDensity& target, const Vector& x0,
                              const OptimizerConfig& cfg = {});

/// Gradient of log pi: analytic if provided, else central differences.
Vector target_gradient(const TargetDensity& target, const Vector& x, double step);

/// Symmetrised Hessian of log pi at mu. Analytic when available; otherwise
/// central differences of the gradient, or second differences of log pi
/// when there is no analytic gradient. Throws NumericalError listing the
/// non-finite entries.
Matrix hessian_at(const TargetDensity& target, const Vector& mu,
                  double step = 6.0554544523933395e-06);

struct ExplorationConfig {
  double beta_hot = 0.5;
  int steps = 5;  // v; each mfind call runs v + 1 hot steps
  double step_scale = 1.0;
  int n_hot_chains = 1;
  double refresh_from_modes = 0.0;  // probability per call of restarting a hot chain at a known mode
  OptimizerConfig optimizer;

  void validate() const;
};

/// Random-walk step on the power-tempered density beta_hot * log pi.
MoveResult hot_step(LevelState& state, const PowerTarget& hot, double step_scale, Stream& rng);

struct DiscoveryEvent {
  std::uint64_t sweep = 0;
  std::uint64_t iteration = 0;  // hot-chain iterations completed so far
  std::size_t chain = 0;
  bool converged = false;
  bool found_new = false;
  double log_pi_at_mode = std::numeric_limits<double>::quiet_NaN();
  double min_pseudo_distance = std::numeric_limits<double>::quiet_NaN();
  std::string note;  // reason a candidate was discarded, if any
};

struct MfindResult {
  bool found_new = false;
  std::uint64_t hot_proposals = 0;
  std::uint64_t hot_accepts = 0;
  std::vector<DiscoveryEvent> events;
};

/// One exploration step: v + 1 hot steps per hot chain, then a local
/// optimisation from each chain's final point and a registry insertion
/// attempt. With `optimise` false only the hot chains move. Each chain c
/// draws from the stream (seed, hot + c, sweep).
MfindResult mfind(std::vector<LevelState>& hot_chains, ModeRegistry& registry,
                  const TargetPtr& base, const ExplorationConfig& cfg, std::uint64_t seed,
                  std::uint64_t sweep, std::uint64_t iterations_before, bool optimise = true);

}  // namespace alps
