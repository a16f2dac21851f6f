#pragma once

#include "alps/target.hpp"

#include <nlohmann/json.hpp>

#include <functional>

namespace alps {

/// Maps a point to a known mode label, or -1.
using ModeLabeler = std::function<int(const Vector&)>;

struct TargetBundle {
  TargetPtr target;
  /// Empty when the target has no intrinsic mode labels; samplers then
  /// label points by their registry allocation.
  ModeLabeler labeler;
};

/// Builds a target from a JSON block {"name": ..., parameters...}. Known
/// names: gaussian, gaussian_mixture, four_mode_skew, skew_normal_mixture,
/// sur, sur_grunfeld. Unknown names or keys raise ConfigError.
TargetBundle make_target(const nlohmann::json& spec);

}  // namespace alps
