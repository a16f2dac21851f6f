#pragma once

#include "alps/config.hpp"
#include "alps/sampler.hpp"
#include "alps/scaling.hpp"
#include "alps/targets/sur.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <vector>

namespace alps {

/// Creates `dir` if needed and checks that a file can be written there.
/// Throws ConfigError otherwise.
void ensure_writable_directory(const std::filesystem::path& dir);

nlohmann::json acceptance_json(const RunDiagnostics& diag);
nlohmann::json timing_json(const RunDiagnostics& diag);
nlohmann::json summary_json(const RunResult& result, const RunConfig& cfg);

/// trace.csv, acceptance.json, modes.json (when a registry exists),
/// timing.json, summary.json, discoveries.csv and config.json.
void emit_outputs(const RunResult& result, const RunConfig& cfg, const std::filesystem::path& dir);

void write_trace_csv(const RunDiagnostics& diag, const std::filesystem::path& file);
void write_scaling_csv(const std::vector<ScalingRow>& rows, const std::filesystem::path& file);
void write_json(const nlohmann::json& doc, const std::filesystem::path& file);

nlohmann::json zellner_json(const ZellnerResult& fit, const SurData& data);

}  // namespace alps
