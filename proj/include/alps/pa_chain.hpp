#pragma once

#include "alps/hat_target.hpp"
#include "alps/linalg.hpp"
#include "alps/mode_registry.hpp"
#include "alps/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace alps {

/// Inverse-temperature schedule: beta_hot for exploration and the annealing
/// ladder 1 = betas[0] < ... < betas[n] = beta_max.
struct TemperatureLadder {
  double beta_hot = 0.5;
  std::vector<double> betas{1.0};

  /// Throws ConfigError unless betas[0] == 1, betas strictly increase and
  /// 0 < beta_hot < 1.
  void validate() const;
  std::size_t coldest() const { return betas.size() - 1; }
  double beta_max() const { return betas.back(); }
};

/// One chain component with its log-density under the current level target.
struct LevelState {
  Vector x;
  double log_density = 0.0;
};

/// The full (n + 2)-component state: hot chain plus one chain per level.
struct LadderState {
  LevelState hot;
  std::vector<LevelState> levels;
  std::uint64_t registry_version = 0;
};

enum class Preconditioner {
  none,                  // isotropic steps
  mode_local_frozen,     // chol(Sigma_A / beta) at the current allocation, treated as symmetric
  mode_local_corrected,  // as above with the Hastings term for the reverse allocation
};

struct RwmConfig {
  double step_scale = 1.0;
  Preconditioner preconditioner = Preconditioner::mode_local_corrected;
};

struct MoveResult {
  bool accepted = false;
  bool finite = true;  // false when the proposal was rejected for a non-finite density
  double log_ratio = 0.0;
};

/// Random-walk Metropolis step driven by explicit noise z ~ N(0, I) and
/// u ~ U(0, 1). Preconditioning falls back to isotropic steps when the
/// target carries no mode information.
MoveResult rwm_step(LevelState& state, const TemperedDensity& target, const RwmConfig& cfg,
                    const Vector& z, double u);
MoveResult rwm_step(LevelState& state, const TemperedDensity& target, const RwmConfig& cfg,
                    Stream& rng);

/// (beta_from / beta_to)^{1/2} (x - mu) + mu.
Vector quanta_transform(const Vector& x, double beta_from, double beta_to, const Vector& mu);

/// Transformation-aided swap of levels k and k + 1. Each point is moved
/// about its own mode to the other level's scale before the exchange.
MoveResult quanta_swap(std::vector<LevelState>& levels, std::size_t k,
                       std::span<const TemperedDensity* const> targets,
                       const ModeRegistry& registry, double u);

/// Classic parallel-tempering exchange of levels k and k + 1.
MoveResult standard_swap(std::vector<LevelState>& levels, std::size_t k,
                         std::span<const TemperedDensity* const> targets, double u);

/// Draw from the Laplace mixture sum_j w_j N(mu_j, Sigma_j / beta).
Vector mixture_propose(const ModeRegistry& registry, double beta, Stream& rng);

/// log sum_j w_j N(y | mu_j, Sigma_j / beta).
double mixture_log_density(const ModeRegistry& registry, double beta, const Vector& y);

enum class LeapKind { local, leap };

struct LeapResult {
  LeapKind kind = LeapKind::local;
  MoveResult move;
};

/// Independence Metropolis-Hastings against the Laplace mixture at the
/// target's temperature, for proposal y.
MoveResult independence_step(LevelState& state, const TemperedDensity& target,
                             const ModeRegistry& registry, const Vector& y, double u);

/// Half the time a local RWM move, otherwise an independence proposal from
/// the Laplace mixture at the coldest temperature.
LeapResult mode_leap_step(LevelState& state, const TemperedDensity& target,
                          const ModeRegistry& registry, const RwmConfig& local, Stream& rng);

}  // namespace alps
