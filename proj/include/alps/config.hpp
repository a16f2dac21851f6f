#pragma once

#include "alps/exploration.hpp"
#include "alps/pa_chain.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace alps {

enum class SwapSelection { uniform, even_odd };

struct RunningEstimateConfig {
  Eigen::Index coordinate = 0;
  double threshold = 0.5;
};

struct PtLadderConfig {
  int levels = 14;
  double ratio = 0.6;
};

/// Everything a run needs. Parsed from a JSON document in which unknown
/// keys are errors; see README for the schema.
struct RunConfig {
  nlohmann::json target = {{"name", "gaussian"}, {"dim", 1}};
  TemperatureLadder ladder;
  int within_steps = 5;                 // v
  std::optional<int> swaps_per_sweep;   // s; defaults to the number of adjacent pairs
  double quanta_probability = 0.5;
  SwapSelection swap_selection = SwapSelection::uniform;
  std::vector<double> step_scales;      // per level; empty = 2.38 / sqrt(d)
  Preconditioner preconditioner = Preconditioner::mode_local_corrected;
  double target_acceptance = 0.234;
  bool exploration_enabled = true;
  ExplorationConfig exploration;
  std::uint64_t samples = 1000;         // sweeps, one target-level sample each
  std::uint64_t burn_in = 100;
  std::optional<std::uint64_t> freeze_sweep;  // defaults to burn_in
  std::uint64_t thin = 10;
  std::uint64_t seed = 1;
  bool seed_set = false;
  std::filesystem::path output_dir = "alps_out";
  std::optional<double> truncation_probability;
  bool truncate_target_level = false;
  std::optional<nlohmann::json> initial_modes;  // registry JSON or list of modes
  std::optional<std::vector<double>> initial_point;
  std::optional<RunningEstimateConfig> running_estimate;
  PtLadderConfig pt;
  int threads = 1;
  int max_initial_searches = 1000;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
  std::uint64_t effective_freeze_sweep() const { return freeze_sweep.value_or(burn_in); }
};

/// Parse a config document. A "preset" key, if present, is expanded first and
/// the remaining keys override it.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json run_config_to_json(const RunConfig& cfg);

/// JSON of a named preset, or ConfigError listing the known names.
nlohmann::json preset_document(const std::string& name);
std::vector<std::string> preset_names();

/// Recursive object merge; scalars and arrays in `overlay` replace `base`.
nlohmann::json merge_json(nlohmann::json base, const nlohmann::json& overlay);

/// Geometric power-tempering ladder 1, r, r^2, ... with `levels` entries.
std::vector<double> geometric_ladder(double ratio, int levels);

}  // namespace alps
