#include "alps/config.hpp"
#include "alps/error.hpp"
#include "alps/outputs.hpp"
#include "alps/sampler.hpp"
#include "alps/scaling.hpp"
#include "alps/targets/factory.hpp"
#include "alps/targets/sur.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

namespace {

using nlohmann::json;

constexpr int kConfigExit = 2;
constexpr int kNumericalExit = 3;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string preset;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON config file");
  cmd->add_option("--seed", f.seed, "RNG seed (overrides the config)");
  cmd->add_option("--out", f.out, "output directory (overrides the config)");
  cmd->add_option("--preset", f.preset, "named preset");
}

json read_document(const CommonFlags& f) {
  json doc = json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw alps::ConfigError("cannot open config '" + f.config + "'");
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw alps::ConfigError("config '" + f.config + "': " + e.what());
    }
    if (!doc.is_object()) throw alps::ConfigError("config '" + f.config + "': expected an object");
  }
  if (!f.preset.empty()) doc["preset"] = f.preset;
  if (f.seed) doc["seed"] = *f.seed;
  return doc;
}

void print_rates(const alps::RunDiagnostics& diag) {
  const json acc = alps::acceptance_json(diag);
  for (const auto& [move, c] : acc["sampling"]["totals"].items()) {
    std::printf("  %-14s %12llu proposed, rate %.4f\n", move.c_str(),
                static_cast<unsigned long long>(c["proposed"].get<std::uint64_t>()), c["rate"].get<double>());
  }
}

int run_sampler(const std::string& which, const CommonFlags& f) {
  alps::RunConfig cfg = alps::parse_run_config(read_document(f));
  if (!f.out.empty()) cfg.output_dir = f.out;
  alps::ensure_writable_directory(cfg.output_dir);
  const alps::TargetBundle bundle = alps::make_target(cfg.target);

  alps::RunResult result;
  if (which == "run") result = alps::alps_run(cfg, bundle);
  else if (which == "pt") result = alps::pt_run(cfg, bundle);
  else result = alps::lais_run(cfg, bundle);

  alps::emit_outputs(result, cfg, cfg.output_dir);
  const auto& diag = result.diagnostics;
  std::printf("%s: %llu sweeps in %.2f s, outputs in %s\n", diag.algorithm.c_str(),
              static_cast<unsigned long long>(diag.sweeps), diag.times.total, cfg.output_dir.string().c_str());
  if (result.registry) std::printf("  modes registered: %zu\n", result.registry->size());
  print_rates(diag);
  const json summary = alps::summary_json(result, cfg);
  if (summary.contains("running_estimate")) {
    std::printf("  running estimate: %.4f\n", summary["running_estimate"]["final"].get<double>());
  }
  return 0;
}

int run_scaling(const CommonFlags& f) {
  json doc = read_document(f);
  doc.erase("preset");
  alps::ScalingExperimentConfig cfg;
  std::string out = "alps_scaling";
  static const std::set<std::string> known = {"shape", "alpha", "ell", "dims", "samples", "seed", "output_dir"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw alps::ConfigError("scaling: unknown key '" + key + "'");
  }
  try {
    if (doc.contains("shape")) cfg.shape = doc["shape"].get<std::string>();
    if (doc.contains("alpha")) cfg.alpha = doc["alpha"].get<double>();
    if (doc.contains("ell")) cfg.ell = doc["ell"].get<double>();
    if (doc.contains("dims")) cfg.dims = doc["dims"].get<std::vector<int>>();
    if (doc.contains("samples")) cfg.samples = doc["samples"].get<std::uint64_t>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("output_dir")) out = doc["output_dir"].get<std::string>();
  } catch (const json::exception& e) {
    throw alps::ConfigError(std::string("scaling: ") + e.what());
  }
  if (!f.out.empty()) out = f.out;
  alps::ensure_writable_directory(out);
  const auto rows = alps::scaling_experiment(cfg);
  alps::write_scaling_csv(rows, std::filesystem::path(out) / "scaling.csv");
  std::printf("%6s %8s %10s %10s %10s\n", "d", "beta", "observed", "stderr", "predicted");
  for (const auto& r : rows) {
    std::printf("%6d %8.2f %10.5f %10.5f %10.5f\n", r.d, r.beta, r.observed_rate, r.mc_stderr, r.predicted_rate);
  }
  return 0;
}

int run_sur_fit(const CommonFlags& f) {
  json doc = read_document(f);
  doc.erase("seed");
  std::string preset = doc.contains("preset") ? doc["preset"].get<std::string>() : "sur_grunfeld";
  doc.erase("preset");
  static const std::set<std::string> known = {"csv", "first_year", "last_year", "firms", "tol", "max_iter",
                                              "rule", "output_dir"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw alps::ConfigError("sur-fit: unknown key '" + key + "'");
  }
  alps::SurData data;
  alps::ZellnerOptions opt;
  std::string out = "alps_sur";
  try {
    const bool custom = doc.contains("csv") || doc.contains("firms") || doc.contains("first_year") ||
                        doc.contains("last_year");
    if (!custom && preset != "sur_grunfeld") {
      throw alps::ConfigError("sur-fit: preset '" + preset + "' needs a csv");
    }
    if (custom) {
      alps::SurCsvOptions csv;
      if (doc.contains("first_year")) csv.first_year = doc["first_year"].get<int>();
      if (doc.contains("last_year")) csv.last_year = doc["last_year"].get<int>();
      if (doc.contains("firms")) csv.firms = doc["firms"].get<std::vector<std::string>>();
      const std::filesystem::path path =
          doc.contains("csv") ? std::filesystem::path(doc["csv"].get<std::string>())
                              : alps::default_data_dir() / "grunfeld.csv";
      data = alps::load_sur_csv(path, csv);
    } else {
      data = alps::grunfeld_five_firms();
    }
    if (doc.contains("tol")) opt.tol = doc["tol"].get<double>();
    if (doc.contains("max_iter")) opt.max_iter = doc["max_iter"].get<int>();
    if (doc.contains("rule")) {
      const auto rule = doc["rule"].get<std::string>();
      if (rule == "max_abs") opt.rule = alps::ConvergenceRule::max_abs;
      else if (rule == "relative_l2") opt.rule = alps::ConvergenceRule::relative_l2;
      else throw alps::ConfigError("sur-fit: rule must be max_abs or relative_l2");
    }
    if (doc.contains("output_dir")) out = doc["output_dir"].get<std::string>();
  } catch (const json::exception& e) {
    throw alps::ConfigError(std::string("sur-fit: ") + e.what());
  }
  if (!f.out.empty()) out = f.out;
  alps::ensure_writable_directory(out);
  const auto fit = alps::zellner_iterate(data, opt);
  alps::write_json(alps::zellner_json(fit, data), std::filesystem::path(out) / "zellner.json");
  std::printf("iterations %d (%s), profile log-likelihood %.4f\n", fit.iterations,
              fit.converged ? "converged" : "not converged", fit.loglik.empty() ? 0.0 : fit.loglik.back());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Annealed leap-point sampler"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::string which;
  for (const char* name : {"run", "pt", "lais", "scaling", "sur-fit"}) {
    static const std::map<std::string, std::string> help = {
        {"run", "annealed leap-point sampler"},
        {"pt", "parallel tempering baseline"},
        {"lais", "single-level leap sampler baseline"},
        {"scaling", "leap acceptance scaling experiment"},
        {"sur-fit", "iterated Zellner fit of a SUR system"}};
    auto* cmd = app.add_subcommand(name, help.at(name));
    add_common(cmd, flags);
    cmd->callback([&which, name] { which = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (which == "scaling") return run_scaling(flags);
    if (which == "sur-fit") return run_sur_fit(flags);
    return run_sampler(which, flags);
  } catch (const alps::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigExit;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kNumericalExit;
  }
}
