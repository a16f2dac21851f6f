#include "alps/outputs.hpp"

#include "alps/error.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>

namespace alps {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open '" + file.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& file) {
  out.flush();
  if (!out) throw NumericalError("write to '" + file.string() + "' failed");
}

json visits_json(const std::vector<int>& labels, std::size_t from) {
  json counts = json::object();
  for (const auto& [label, n] : visit_counts(labels, from)) counts[std::to_string(label)] = n;
  return {{"counts", counts}, {"switches", label_switches(labels, from)}};
}

}  // namespace

void ensure_writable_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw ConfigError("output directory '" + dir.string() + "' cannot be created");
  }
  const auto probe = dir / ".alps_write_probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "ok") || !out.flush()) {
      throw ConfigError("output directory '" + dir.string() + "' is not writable");
    }
  }
  std::filesystem::remove(probe, ec);
}

void write_json(const json& doc, const std::filesystem::path& file) {
  auto out = open_output(file);
  out << doc.dump(2) << '\n';
  finish(out, file);
}

void write_trace_csv(const RunDiagnostics& diag, const std::filesystem::path& file) {
  auto out = open_output(file);
  out << "sweep";
  for (Eigen::Index i = 0; i < diag.dim; ++i) out << ",x" << i;
  out << '\n';
  for (std::size_t r = 0; r < diag.trace.size(); ++r) {
    out << diag.trace_sweeps[r];
    for (double v : diag.trace[r]) out << ',' << fmt(v);
    out << '\n';
  }
  finish(out, file);
}

void write_scaling_csv(const std::vector<ScalingRow>& rows, const std::filesystem::path& file) {
  auto out = open_output(file);
  out << "d,beta,observed_rate,mc_stderr,predicted_rate\n";
  for (const auto& r : rows) {
    out << r.d << ',' << fmt(r.beta) << ',' << fmt(r.observed_rate) << ',' << fmt(r.mc_stderr) << ','
        << fmt(r.predicted_rate) << '\n';
  }
  finish(out, file);
}

json acceptance_json(const RunDiagnostics& diag) {
  json doc = {{"algorithm", diag.algorithm},
              {"sampling", diag.sampling_counts.to_json()},
              {"burn_in", diag.burn_in_counts.to_json()}};
  const MoveCounter leap = diag.sampling_counts.total(MoveType::leap);
  if (leap.proposed) doc["leap_rate"] = leap.rate();
  return doc;
}

json timing_json(const RunDiagnostics& diag) {
  const double sweeps = static_cast<double>(diag.sweep_seconds.size());
  const double sampling = std::accumulate(
      diag.sweep_seconds.begin() + static_cast<std::ptrdiff_t>(std::min<std::uint64_t>(diag.burn_in, diag.sweep_seconds.size())),
      diag.sweep_seconds.end(), 0.0);
  const double kept = sweeps - static_cast<double>(std::min<std::uint64_t>(diag.burn_in, diag.sweep_seconds.size()));
  return {{"total_seconds", diag.times.total},
          {"within_level_seconds", diag.times.within},
          {"swap_seconds", diag.times.swaps},
          {"exploration_seconds", diag.times.exploration},
          {"sweeps", diag.sweep_seconds.size()},
          {"seconds_per_1000_samples", sweeps > 0 ? 1000.0 * diag.times.total / sweeps : 0.0},
          {"sampling_seconds_per_1000_samples", kept > 0 ? 1000.0 * sampling / kept : 0.0}};
}

json summary_json(const RunResult& result, const RunConfig& cfg) {
  const RunDiagnostics& diag = result.diagnostics;
  const std::size_t from = static_cast<std::size_t>(std::min<std::uint64_t>(diag.burn_in, diag.visits_target.size()));
  json doc = {{"algorithm", diag.algorithm},
              {"dim", diag.dim},
              {"sweeps", diag.sweeps},
              {"burn_in", diag.burn_in},
              {"betas", diag.betas},
              {"final_step_scales", diag.step_scales},
              {"visits_target", visits_json(diag.visits_target, from)}};
  if (!diag.visits_coldest.empty()) doc["visits_coldest"] = visits_json(diag.visits_coldest, from);
  if (result.registry) doc["modes_found"] = result.registry->size();
  doc["discovery_events"] = diag.discoveries.size();

  if (cfg.running_estimate && diag.tracked.size() > diag.burn_in + 1) {
    const auto f = running_prob_estimate(diag.tracked, cfg.running_estimate->threshold,
                                         static_cast<std::size_t>(diag.burn_in));
    const auto printed = running_prob_estimate(diag.tracked, cfg.running_estimate->threshold,
                                               static_cast<std::size_t>(diag.burn_in), true);
    json checkpoints = json::array();
    const std::size_t stride = std::max<std::size_t>(1, f.size() / 20);
    for (std::size_t i = stride - 1; i < f.size(); i += stride) {
      checkpoints.push_back({{"sweep", diag.burn_in + i + 1}, {"estimate", f[i]}});
    }
    doc["running_estimate"] = {{"coordinate", cfg.running_estimate->coordinate},
                               {"threshold", cfg.running_estimate->threshold},
                               {"final", f.back()},
                               {"final_printed_normaliser", printed.back()},
                               {"checkpoints", checkpoints}};
  }
  return doc;
}

void emit_outputs(const RunResult& result, const RunConfig& cfg, const std::filesystem::path& dir) {
  ensure_writable_directory(dir);
  const RunDiagnostics& diag = result.diagnostics;
  write_trace_csv(diag, dir / "trace.csv");
  write_json(acceptance_json(diag), dir / "acceptance.json");
  if (result.registry) write_json(result.registry->to_json(), dir / "modes.json");
  write_json(timing_json(diag), dir / "timing.json");
  write_json(summary_json(result, cfg), dir / "summary.json");
  write_json(run_config_to_json(cfg), dir / "config.json");

  const auto file = dir / "discoveries.csv";
  auto out = open_output(file);
  out << "sweep,iteration,chain,converged,found_new,log_pi_at_mode,min_pseudo_distance,note\n";
  for (const auto& ev : diag.discoveries) {
    out << ev.sweep << ',' << ev.iteration << ',' << ev.chain << ',' << (ev.converged ? 1 : 0) << ','
        << (ev.found_new ? 1 : 0) << ',' << fmt(ev.log_pi_at_mode) << ',' << fmt(ev.min_pseudo_distance)
        << ",\"" << ev.note << "\"\n";
  }
  finish(out, file);
}

json zellner_json(const ZellnerResult& fit, const SurData& data) {
  json eqs = json::array();
  const Eigen::Index j = data.covariates();
  for (Eigen::Index m = 0; m < data.equations(); ++m) {
    std::vector<double> coef(fit.theta.data() + m * j, fit.theta.data() + (m + 1) * j);
    eqs.push_back({{"label", data.labels[static_cast<std::size_t>(m)]}, {"coefficients", coef}});
  }
  json sigma = json::array();
  for (Eigen::Index r = 0; r < fit.sigma.rows(); ++r) {
    std::vector<double> row(fit.sigma.cols());
    for (Eigen::Index c = 0; c < fit.sigma.cols(); ++c) row[c] = fit.sigma(r, c);
    sigma.push_back(row);
  }
  return {{"iterations", fit.iterations},
          {"converged", fit.converged},
          {"loglik", fit.loglik.empty() ? json(nullptr) : json(fit.loglik.back())},
          {"loglik_path", fit.loglik},
          {"equations", eqs},
          {"sigma", sigma}};
}

}  // namespace alps
