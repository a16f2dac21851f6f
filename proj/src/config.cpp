#include "alps/config.hpp"

#include "alps/error.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace alps {

namespace {

using nlohmann::json;

// Reads the keys of one JSON object and rejects any it was not asked for.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where_ + "." + key + ": wrong type");
    }
  }

  template <class T>
  void read(const std::string& key, std::optional<T>& out) {
    if (!has(key)) return;
    T v{};
    read(key, v);
    out = v;
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
    }
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

Preconditioner parse_preconditioner(const std::string& s) {
  if (s == "none") return Preconditioner::none;
  if (s == "mode_local_frozen") return Preconditioner::mode_local_frozen;
  if (s == "mode_local_corrected") return Preconditioner::mode_local_corrected;
  throw ConfigError("rwm.preconditioner: expected none, mode_local_frozen or mode_local_corrected");
}

std::string to_string(Preconditioner p) {
  switch (p) {
    case Preconditioner::none: return "none";
    case Preconditioner::mode_local_frozen: return "mode_local_frozen";
    case Preconditioner::mode_local_corrected: return "mode_local_corrected";
  }
  return "none";
}

std::vector<double> powers_of_four(int n) {
  std::vector<double> b;
  for (int i = 0; i < n; ++i) b.push_back(std::pow(4.0, i));
  return b;
}

json skew20_base() {
  return {
      {"target", {{"name", "four_mode_skew"}, {"dim", 20}, {"alpha", 10.0}}},
      {"ladder", {{"beta_hot", 5e-6}, {"betas", powers_of_four(7)}}},
      {"within_steps", 5},
      {"exploration", {{"enabled", true}, {"steps", 5}, {"step_scale", 10.0}}},
      {"samples", 200000},
      {"burn_in", 15000},
      {"thin", 10},
      {"seed", 1},
      {"running_estimate", {{"coordinate", 0}, {"threshold", 0.5}}},
      {"pt", {{"levels", 14}, {"ratio", 0.6}}},
  };
}

}  // namespace

std::vector<double> geometric_ladder(double ratio, int levels) {
  if (!(ratio > 0.0 && ratio < 1.0) || levels < 1) {
    throw ConfigError("geometric ladder: ratio must lie in (0, 1) and levels >= 1");
  }
  std::vector<double> b(static_cast<std::size_t>(levels));
  for (int i = 0; i < levels; ++i) b[static_cast<std::size_t>(i)] = std::pow(ratio, i);
  return b;
}

json merge_json(json base, const json& overlay) {
  if (!base.is_object() || !overlay.is_object()) return overlay;
  for (const auto& [key, value] : overlay.items()) {
    if (base.contains(key) && base[key].is_object() && value.is_object()) {
      base[key] = merge_json(base[key], value);
    } else {
      base[key] = value;
    }
  }
  return base;
}

std::vector<std::string> preset_names() {
  return {"skew20", "skew20_pt", "skew20_lais", "sur_grunfeld", "sur_bivariate", "gaussian1d"};
}

json preset_document(const std::string& name) {
  if (name == "skew20") return skew20_base();
  if (name == "skew20_pt") {
    json doc = skew20_base();
    doc["exploration"]["enabled"] = false;
    doc["initial_point"] = std::vector<double>(20, 20.0);
    return doc;
  }
  if (name == "skew20_lais") {
    json doc = skew20_base();
    doc["ladder"]["betas"] = std::vector<double>{1.0};
    return doc;
  }
  if (name == "sur_grunfeld") {
    return {
        {"target", {{"name", "sur_grunfeld"}}},
        {"ladder", {{"beta_hot", 0.067}, {"betas", {1.00, 1.10, 1.40, 1.96, 2.74, 3.84, 5.38}}}},
        {"within_steps", 5},
        {"exploration", {{"enabled", true}, {"steps", 3}, {"step_scale", 1.0}}},
        {"truncation", {{"probability", 0.9999}}},
        {"samples", 50000},
        {"burn_in", 10000},
        {"thin", 10},
        {"seed", 1},
    };
  }
  if (name == "sur_bivariate") {
    return {
        {"target", {{"name", "sur"}, {"csv", nullptr}}},
        {"ladder", {{"beta_hot", 0.5}, {"betas", {1.0, std::sqrt(10.0), 10.0}}}},
        {"within_steps", 5},
        {"exploration", {{"enabled", true}, {"steps", 3}, {"step_scale", 1.0}}},
        {"samples", 10000},
        {"burn_in", 1000},
        {"thin", 1},
        {"seed", 1},
    };
  }
  if (name == "gaussian1d") {
    return {
        {"target", {{"name", "gaussian"}, {"dim", 1}}},
        {"ladder", {{"beta_hot", 0.5}, {"betas", {1.0, 4.0}}}},
        {"within_steps", 5},
        {"exploration", {{"enabled", true}, {"steps", 5}, {"step_scale", 1.0}}},
        {"samples", 200000},
        {"burn_in", 2000},
        {"thin", 20},
        {"seed", 1},
    };
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

void RunConfig::validate() const {
  ladder.validate();
  if (!target.is_object() || !target.contains("name")) throw ConfigError("target: missing name");
  if (within_steps < 1) throw ConfigError("within_steps must be at least 1");
  if (swaps_per_sweep && *swaps_per_sweep < 0) throw ConfigError("swaps_per_sweep must be >= 0");
  if (!(quanta_probability >= 0.0 && quanta_probability <= 1.0)) {
    throw ConfigError("quanta_probability must lie in [0, 1]");
  }
  if (!step_scales.empty() && step_scales.size() != 1 && step_scales.size() != ladder.betas.size()) {
    throw ConfigError("rwm.step_scales: give one value or one per level");
  }
  for (double s : step_scales) {
    if (!(s > 0.0)) throw ConfigError("rwm.step_scales must be positive");
  }
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0)) {
    throw ConfigError("rwm.target_acceptance must lie in (0, 1)");
  }
  exploration.validate();
  if (exploration.beta_hot != ladder.beta_hot) throw ConfigError("exploration beta_hot differs from ladder");
  if (samples == 0) throw ConfigError("samples must be positive");
  if (thin == 0) throw ConfigError("thin must be positive");
  if (!seed_set) throw ConfigError("seed must be set");
  if (truncation_probability && !(*truncation_probability > 0.0 && *truncation_probability < 1.0)) {
    throw ConfigError("truncation.probability must lie in (0, 1)");
  }
  if (pt.levels < 1 || !(pt.ratio > 0.0 && pt.ratio < 1.0)) {
    throw ConfigError("pt: levels >= 1 and ratio in (0, 1) required");
  }
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (max_initial_searches < 1) throw ConfigError("max_initial_searches must be at least 1");
}

RunConfig parse_run_config(const json& input) {
  json doc = input;
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) throw ConfigError("preset: expected a name");
    json overlay = doc;
    overlay.erase("preset");
    doc = merge_json(preset_document(doc["preset"].get<std::string>()), overlay);
  }

  RunConfig cfg;
  ObjectReader top(doc, "config");
  if (top.has("target")) cfg.target = top.raw("target");

  if (top.has("ladder")) {
    ObjectReader r(top.raw("ladder"), "ladder");
    r.read("beta_hot", cfg.ladder.beta_hot);
    r.read("betas", cfg.ladder.betas);
    r.finish();
  }
  top.read("within_steps", cfg.within_steps);
  top.read("swaps_per_sweep", cfg.swaps_per_sweep);
  top.read("quanta_probability", cfg.quanta_probability);
  if (top.has("swap_selection")) {
    std::string s;
    top.read("swap_selection", s);
    if (s == "uniform") cfg.swap_selection = SwapSelection::uniform;
    else if (s == "even_odd") cfg.swap_selection = SwapSelection::even_odd;
    else throw ConfigError("swap_selection: expected uniform or even_odd");
  }
  if (top.has("rwm")) {
    ObjectReader r(top.raw("rwm"), "rwm");
    if (r.has("step_scales")) {
      const json& s = r.raw("step_scales");
      if (s.is_number()) cfg.step_scales = {s.get<double>()};
      else r.read("step_scales", cfg.step_scales);
    }
    if (r.has("preconditioner")) {
      std::string p;
      r.read("preconditioner", p);
      cfg.preconditioner = parse_preconditioner(p);
    }
    r.read("target_acceptance", cfg.target_acceptance);
    r.finish();
  }
  if (top.has("exploration")) {
    ObjectReader r(top.raw("exploration"), "exploration");
    r.read("enabled", cfg.exploration_enabled);
    r.read("steps", cfg.exploration.steps);
    r.read("step_scale", cfg.exploration.step_scale);
    r.read("n_hot_chains", cfg.exploration.n_hot_chains);
    r.read("refresh_from_modes", cfg.exploration.refresh_from_modes);
    if (r.has("optimizer")) {
      ObjectReader o(r.raw("optimizer"), "exploration.optimizer");
      auto& opt = cfg.exploration.optimizer;
      o.read("max_iterations", opt.max_iterations);
      o.read("gradient_tolerance", opt.gradient_tolerance);
      o.read("armijo", opt.armijo);
      o.read("shrink", opt.shrink);
      o.read("finite_difference_step", opt.finite_difference_step);
      o.read("hessian_start", opt.hessian_start);
      o.finish();
    }
    r.finish();
  }
  cfg.exploration.beta_hot = cfg.ladder.beta_hot;

  top.read("samples", cfg.samples);
  top.read("burn_in", cfg.burn_in);
  top.read("freeze_sweep", cfg.freeze_sweep);
  top.read("thin", cfg.thin);
  if (top.has("seed")) {
    top.read("seed", cfg.seed);
    cfg.seed_set = true;
  }
  if (top.has("output_dir")) {
    std::string dir;
    top.read("output_dir", dir);
    cfg.output_dir = dir;
  }
  if (top.has("truncation")) {
    ObjectReader r(top.raw("truncation"), "truncation");
    r.read("probability", cfg.truncation_probability);
    r.read("target_level", cfg.truncate_target_level);
    r.finish();
  }
  if (top.has("initial_modes")) cfg.initial_modes = top.raw("initial_modes");
  top.read("initial_point", cfg.initial_point);
  if (top.has("running_estimate")) {
    ObjectReader r(top.raw("running_estimate"), "running_estimate");
    RunningEstimateConfig re;
    r.read("coordinate", re.coordinate);
    r.read("threshold", re.threshold);
    r.finish();
    cfg.running_estimate = re;
  }
  if (top.has("pt")) {
    ObjectReader r(top.raw("pt"), "pt");
    r.read("levels", cfg.pt.levels);
    r.read("ratio", cfg.pt.ratio);
    r.finish();
  }
  top.read("threads", cfg.threads);
  top.read("max_initial_searches", cfg.max_initial_searches);
  top.finish();

  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_run_config(doc);
}

json run_config_to_json(const RunConfig& cfg) {
  json j;
  j["target"] = cfg.target;
  j["ladder"] = {{"beta_hot", cfg.ladder.beta_hot}, {"betas", cfg.ladder.betas}};
  j["within_steps"] = cfg.within_steps;
  if (cfg.swaps_per_sweep) j["swaps_per_sweep"] = *cfg.swaps_per_sweep;
  j["quanta_probability"] = cfg.quanta_probability;
  j["swap_selection"] = cfg.swap_selection == SwapSelection::uniform ? "uniform" : "even_odd";
  j["rwm"] = {{"step_scales", cfg.step_scales},
              {"preconditioner", to_string(cfg.preconditioner)},
              {"target_acceptance", cfg.target_acceptance}};
  const auto& e = cfg.exploration;
  j["exploration"] = {
      {"enabled", cfg.exploration_enabled},
      {"steps", e.steps},
      {"step_scale", e.step_scale},
      {"n_hot_chains", e.n_hot_chains},
      {"refresh_from_modes", e.refresh_from_modes},
      {"optimizer",
       {{"max_iterations", e.optimizer.max_iterations},
        {"gradient_tolerance", e.optimizer.gradient_tolerance},
        {"armijo", e.optimizer.armijo},
        {"shrink", e.optimizer.shrink},
        {"finite_difference_step", e.optimizer.finite_difference_step},
        {"hessian_start", e.optimizer.hessian_start}}}};
  j["samples"] = cfg.samples;
  j["burn_in"] = cfg.burn_in;
  if (cfg.freeze_sweep) j["freeze_sweep"] = *cfg.freeze_sweep;
  j["thin"] = cfg.thin;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir.string();
  if (cfg.truncation_probability) {
    j["truncation"] = {{"probability", *cfg.truncation_probability},
                       {"target_level", cfg.truncate_target_level}};
  }
  if (cfg.initial_modes) j["initial_modes"] = *cfg.initial_modes;
  if (cfg.initial_point) j["initial_point"] = *cfg.initial_point;
  if (cfg.running_estimate) {
    j["running_estimate"] = {{"coordinate", cfg.running_estimate->coordinate},
                             {"threshold", cfg.running_estimate->threshold}};
  }
  j["pt"] = {{"levels", cfg.pt.levels}, {"ratio", cfg.pt.ratio}};
  j["threads"] = cfg.threads;
  j["max_initial_searches"] = cfg.max_initial_searches;
  return j;
}

}  // namespace alps
