#pragma once

#include "alps/exploration.hpp"
#include "alps/linalg.hpp"
#include "alps/pa_chain.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace alps {

enum class MoveType { rwm, leap_local, leap, quanta_swap, standard_swap, hot };

std::string to_string(MoveType t);

struct MoveCounter {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  std::uint64_t nonfinite = 0;  // rejected for a non-finite density; included in proposed

  std::uint64_t rejected() const { return proposed - accepted; }
  double rate() const { return proposed ? static_cast<double>(accepted) / proposed : 0.0; }
  MoveCounter& operator+=(const MoveCounter& o);
};

using CounterKey = std::pair<MoveType, int>;  // (move, level); swaps use the lower level

class CounterTable {
 public:
  void record(MoveType type, int level, const MoveResult& r);
  void add(MoveType type, int level, const MoveCounter& c);
  const std::map<CounterKey, MoveCounter>& entries() const { return entries_; }
  MoveCounter get(MoveType type, int level) const;
  /// Sum over levels.
  MoveCounter total(MoveType type) const;
  nlohmann::json to_json() const;

 private:
  std::map<CounterKey, MoveCounter> entries_;
};

struct PhaseTimes {
  double within = 0.0;
  double swaps = 0.0;
  double exploration = 0.0;
  double total = 0.0;
};

struct RunDiagnostics {
  std::string algorithm;
  Eigen::Index dim = 0;
  std::uint64_t sweeps = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t thin = 1;
  std::vector<double> betas;

  CounterTable burn_in_counts;
  CounterTable sampling_counts;

  std::vector<std::uint64_t> trace_sweeps;  // thinned
  std::vector<Vector> trace;                // level-0 states at trace_sweeps
  std::optional<Eigen::Index> tracked_coordinate;
  std::vector<double> tracked;              // that coordinate at every sweep

  std::vector<int> visits_target;   // mode label at level 0, every sweep
  std::vector<int> visits_coldest;  // mode label at the coldest level, every sweep

  std::vector<DiscoveryEvent> discoveries;
  std::vector<double> sweep_seconds;
  PhaseTimes times;
  std::vector<double> step_scales;  // final, per level

  CounterTable& counts_for(std::uint64_t sweep) {
    return sweep < burn_in ? burn_in_counts : sampling_counts;
  }
};

/// Visit counts per label over [from, end) of a label sequence.
std::map<int, std::uint64_t> visit_counts(const std::vector<int>& labels, std::size_t from = 0);

/// Number of label changes between consecutive entries from `from` on.
std::uint64_t label_switches(const std::vector<int>& labels, std::size_t from = 0);

}  // namespace alps
