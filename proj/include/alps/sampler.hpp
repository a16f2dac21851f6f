#pragma once

#include "alps/config.hpp"
#include "alps/diagnostics.hpp"
#include "alps/mode_registry.hpp"
#include "alps/targets/factory.hpp"

#include <optional>
#include <span>
#include <vector>

namespace alps {

struct RunResult {
  RunDiagnostics diagnostics;
  std::optional<ModeRegistry> registry;  // absent for PT
  /// Target-level states after burn-in, thinned.
  std::vector<Vector> samples() const;
};

/// Annealed leap-point sampler. Each sweep runs v random-walk updates at
/// levels 0..n-1, v mode-leap updates at level n, s swap proposals and one
/// exploration step. Step scales adapt towards the target acceptance and the
/// registry accepts new modes only before the freeze sweep.
RunResult alps_run(const RunConfig& cfg, const TargetBundle& target);

/// Power-tempered parallel tempering on the geometric ladder from cfg.pt with
/// standard swaps only. No registry.
RunResult pt_run(const RunConfig& cfg, const TargetBundle& target);

/// Single-level variant: mode finding plus leap moves at the target
/// temperature, no annealing.
RunResult lais_run(const RunConfig& cfg, const TargetBundle& target);

/// f(i) = (1 / (i - b)) sum_{j=b+1}^{i} 1{x_j < threshold} for i = b+1..T
/// (1-based). With `printed_normaliser` the divisor is i - b - 1 and the
/// sequence starts at i = b + 2.
std::vector<double> running_prob_estimate(std::span<const double> trace, double threshold,
                                          std::size_t burn_in, bool printed_normaliser = false);

}  // namespace alps
