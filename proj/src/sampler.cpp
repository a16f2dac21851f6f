#include "alps/sampler.hpp"

#include "alps/error.hpp"
#include "alps/hat_target.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <memory>
#include <sstream>

namespace alps {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Robbins-Monro gain for log step-scale adaptation.
double adaptation_gain(std::uint64_t t) { return std::pow(static_cast<double>(t) + 1.0, -0.6); }

std::string describe_point(const Vector& x) {
  std::ostringstream out;
  out << "(";
  const Eigen::Index shown = std::min<Eigen::Index>(x.size(), 4);
  for (Eigen::Index i = 0; i < shown; ++i) out << (i ? ", " : "") << x[i];
  if (x.size() > shown) out << ", ...";
  out << ")";
  return out.str();
}

[[noreturn]] void rethrow_with_context(std::uint64_t sweep, const std::string& where, const Vector& x) {
  const std::string ctx = "sweep " + std::to_string(sweep) + ", " + where + " at x = " + describe_point(x) + ": ";
  try {
    throw;
  } catch (const NoModesError&) {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(ctx + e.what());
  } catch (const std::exception& e) {
    throw NumericalError(ctx + e.what());
  }
}

ModeRegistry initial_registry(const RunConfig& cfg, const TargetDensity& base) {
  const Eigen::Index d = base.dim();
  if (!cfg.initial_modes) return ModeRegistry(d);
  const json& j = *cfg.initial_modes;
  if (j.is_object()) {
    ModeRegistry r = ModeRegistry::from_json(j);
    if (r.dim() != d) throw ConfigError("initial_modes: dimension does not match the target");
    return r;
  }
  if (!j.is_array()) throw ConfigError("initial_modes: expected a registry object or a list of modes");
  ModeRegistry r(d);
  for (const auto& m : j) {
    try {
      const auto mu_v = m.at("mu").get<std::vector<double>>();
      const Vector mu = Eigen::Map<const Vector>(mu_v.data(), static_cast<Eigen::Index>(mu_v.size()));
      if (mu.size() != d) throw ConfigError("initial_modes: mu has the wrong length");
      const auto rows = m.at("sigma").get<std::vector<std::vector<double>>>();
      Matrix sigma(d, d);
      if (static_cast<Eigen::Index>(rows.size()) != d) throw ConfigError("initial_modes: sigma has the wrong shape");
      for (Eigen::Index a = 0; a < d; ++a) {
        if (static_cast<Eigen::Index>(rows[a].size()) != d) throw ConfigError("initial_modes: sigma has the wrong shape");
        for (Eigen::Index b = 0; b < d; ++b) sigma(a, b) = rows[a][b];
      }
      const double lp = m.contains("log_pi_at_mode") ? m["log_pi_at_mode"].get<double>() : base.log_density(mu);
      r.try_insert(ModeInfo::from_covariance(mu, sigma, lp));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("initial_modes: ") + e.what());
    }
  }
  return r;
}

std::vector<double> initial_scales(const RunConfig& cfg, std::size_t levels, Eigen::Index d) {
  std::vector<double> s(levels, 2.38 / std::sqrt(static_cast<double>(d)));
  if (cfg.step_scales.size() == 1) std::fill(s.begin(), s.end(), cfg.step_scales.front());
  if (cfg.step_scales.size() == levels) s = cfg.step_scales;
  return s;
}

struct LevelTargets {
  std::vector<std::unique_ptr<TemperedDensity>> owned;
  std::vector<const TemperedDensity*> ptrs;
};

LevelTargets build_targets(const TargetPtr& base, const RegistrySnapshot& snapshot,
                           const std::vector<double>& betas, std::optional<double> q,
                           bool truncate_target_level) {
  LevelTargets t;
  for (std::size_t k = 0; k < betas.size(); ++k) {
    HatTarget hat(base, snapshot, betas[k]);
    if (q && (k > 0 || truncate_target_level)) {
      t.owned.push_back(std::make_unique<TruncatedHatTarget>(std::move(hat), *q));
    } else {
      t.owned.push_back(std::make_unique<HatTarget>(std::move(hat)));
    }
    t.ptrs.push_back(t.owned.back().get());
  }
  return t;
}

std::vector<std::size_t> swap_schedule(const RunConfig& cfg, std::size_t pairs) {
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < pairs; k += 2) order.push_back(k);
  for (std::size_t k = 1; k < pairs; k += 2) order.push_back(k);
  (void)cfg;
  return order;
}

struct LevelOutcome {
  MoveCounter local;
  MoveCounter leap;
};

void tally(MoveCounter& c, const MoveResult& r) {
  ++c.proposed;
  if (r.accepted) ++c.accepted;
  if (!r.finite) ++c.nonfinite;
}

// Runs `work(k)` for every level, on up to `threads` workers. Results are
// written per level, so the outcome does not depend on the thread count.
template <class F>
void for_each_level(std::size_t levels, int threads, F&& work) {
  if (threads <= 1 || levels <= 1) {
    for (std::size_t k = 0; k < levels; ++k) work(k);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), levels);
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 1; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t k = w; k < levels; k += workers) work(k);
    }));
  }
  for (std::size_t k = 0; k < levels; k += workers) work(k);
  for (auto& j : jobs) j.get();
}

void record_trace(RunDiagnostics& diag, std::uint64_t sweep, const Vector& x) {
  if (sweep % diag.thin == 0) {
    diag.trace_sweeps.push_back(sweep);
    diag.trace.push_back(x);
  }
  if (diag.tracked_coordinate) diag.tracked.push_back(x[*diag.tracked_coordinate]);
}

RunDiagnostics start_diagnostics(const RunConfig& cfg, std::string algorithm, Eigen::Index d,
                                 std::vector<double> betas) {
  RunDiagnostics diag;
  diag.algorithm = std::move(algorithm);
  diag.dim = d;
  diag.sweeps = cfg.samples;
  diag.burn_in = cfg.burn_in;
  diag.thin = cfg.thin;
  diag.betas = std::move(betas);
  if (cfg.running_estimate) {
    if (cfg.running_estimate->coordinate < 0 || cfg.running_estimate->coordinate >= d) {
      throw ConfigError("running_estimate.coordinate is out of range");
    }
    diag.tracked_coordinate = cfg.running_estimate->coordinate;
  }
  diag.trace.reserve(cfg.samples / cfg.thin + 1);
  diag.trace_sweeps.reserve(cfg.samples / cfg.thin + 1);
  diag.visits_target.reserve(cfg.samples);
  diag.sweep_seconds.reserve(cfg.samples);
  return diag;
}

RunResult run_annealed(const RunConfig& cfg, const TargetBundle& bundle, const std::string& algorithm) {
  cfg.validate();
  if (!bundle.target) throw ConfigError("no target");
  const TargetPtr& base = bundle.target;
  const Eigen::Index d = base->dim();
  const std::vector<double>& betas = cfg.ladder.betas;
  const std::size_t n_levels = betas.size();
  const std::size_t coldest = n_levels - 1;
  const auto t_start = Clock::now();

  RunResult result;
  RunDiagnostics diag = start_diagnostics(cfg, algorithm, d, betas);
  ModeRegistry registry = initial_registry(cfg, *base);

  std::optional<double> q;
  if (cfg.truncation_probability) q = truncation_level(*cfg.truncation_probability, d);

  Vector hot_start = Vector::Zero(d);
  if (cfg.initial_point) {
    if (static_cast<Eigen::Index>(cfg.initial_point->size()) != d) {
      throw ConfigError("initial_point has the wrong length");
    }
    hot_start = Eigen::Map<const Vector>(cfg.initial_point->data(), d);
  }
  if (!std::isfinite(base->log_density(hot_start))) {
    throw ConfigError("target log-density is not finite at the initial point");
  }

  const ExplorationConfig& ex = cfg.exploration;
  std::vector<LevelState> hot(static_cast<std::size_t>(ex.n_hot_chains));
  {
    const PowerTarget hot_target(base, ex.beta_hot);
    for (auto& h : hot) h = {hot_start, hot_target.log_density(hot_start)};
  }
  std::uint64_t hot_iterations = 0;

  auto run_exploration = [&](std::uint64_t key, std::uint64_t sweep, bool optimise) {
    MfindResult m = mfind(hot, registry, base, ex, cfg.seed, key, hot_iterations, optimise);
    hot_iterations += static_cast<std::uint64_t>(ex.steps + 1);
    MoveCounter c{m.hot_proposals, m.hot_accepts, 0};
    diag.counts_for(sweep).add(MoveType::hot, -1, c);
    for (auto& ev : m.events) {
      ev.sweep = sweep;
      diag.discoveries.push_back(std::move(ev));
    }
  };

  if (registry.empty() && cfg.exploration_enabled) {
    for (int attempt = 0; attempt < cfg.max_initial_searches && registry.empty(); ++attempt) {
      run_exploration(0x80000000ull + static_cast<std::uint64_t>(attempt), 0, true);
    }
    if (registry.empty()) throw NoModesError();
  }

  Vector x0 = hot_start;
  if (!cfg.initial_point && !registry.empty()) x0 = registry.mode(0).mu;

  auto snapshot = std::make_shared<const ModeRegistry>(registry);
  LevelTargets targets = build_targets(base, snapshot, betas, q, cfg.truncate_target_level);
  std::vector<LevelState> levels(n_levels);
  for (std::size_t k = 0; k < n_levels; ++k) {
    levels[k].x = x0;
    try {
      levels[k].log_density = targets.ptrs[k]->log_density(x0);
    } catch (...) {
      rethrow_with_context(0, "level " + std::to_string(k), x0);
    }
    if (!std::isfinite(levels[k].log_density) && !registry.empty()) {
      levels[k].x = registry.mode(allocate_mode(x0, 1.0, registry)).mu;
      levels[k].log_density = targets.ptrs[k]->log_density(levels[k].x);
    }
  }

  std::vector<double> log_scale;
  for (double s : initial_scales(cfg, n_levels, d)) log_scale.push_back(std::log(s));
  const std::size_t pairs = coldest;
  const std::size_t swaps = cfg.swaps_per_sweep ? static_cast<std::size_t>(*cfg.swaps_per_sweep) : pairs;
  const std::vector<std::size_t> even_odd = swap_schedule(cfg, pairs);
  const std::uint64_t freeze = cfg.effective_freeze_sweep();

  auto label = [&](const Vector& x) -> int {
    if (bundle.labeler) return bundle.labeler(x);
    if (!snapshot->empty()) return static_cast<int>(allocate_mode(x, 1.0, *snapshot));
    return -1;
  };

  std::vector<LevelOutcome> outcomes(n_levels);
  for (std::uint64_t sweep = 0; sweep < cfg.samples; ++sweep) {
    const auto t_sweep = Clock::now();

    if (snapshot->version() != registry.version()) {
      snapshot = std::make_shared<const ModeRegistry>(registry);
      targets = build_targets(base, snapshot, betas, q, cfg.truncate_target_level);
      for (std::size_t k = 0; k < n_levels; ++k) {
        levels[k].log_density = targets.ptrs[k]->log_density(levels[k].x);
      }
    }

    // Within-level moves.
    auto t_phase = Clock::now();
    for_each_level(n_levels, cfg.threads, [&](std::size_t k) {
      LevelOutcome out;
      Stream rng(cfg.seed, purpose::kLevel + static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(sweep));
      const RwmConfig rc{std::exp(log_scale[k]), cfg.preconditioner};
      try {
        for (int i = 0; i < cfg.within_steps; ++i) {
          if (k == coldest) {
            const LeapResult r = mode_leap_step(levels[k], *targets.ptrs[k], *snapshot, rc, rng);
            tally(r.kind == LeapKind::local ? out.local : out.leap, r.move);
          } else {
            tally(out.local, rwm_step(levels[k], *targets.ptrs[k], rc, rng));
          }
        }
      } catch (...) {
        rethrow_with_context(sweep, "level " + std::to_string(k), levels[k].x);
      }
      outcomes[k] = out;
    });
    CounterTable& counts = diag.counts_for(sweep);
    for (std::size_t k = 0; k < n_levels; ++k) {
      const int lv = static_cast<int>(k);
      counts.add(k == coldest ? MoveType::leap_local : MoveType::rwm, lv, outcomes[k].local);
      if (k == coldest) counts.add(MoveType::leap, lv, outcomes[k].leap);
    }
    diag.times.within += seconds_since(t_phase);

    // Temperature swaps.
    t_phase = Clock::now();
    if (pairs > 0) {
      Stream rng(cfg.seed, purpose::kSwap, static_cast<std::uint32_t>(sweep));
      for (std::size_t i = 0; i < swaps; ++i) {
        const std::size_t k = cfg.swap_selection == SwapSelection::uniform
                                  ? static_cast<std::size_t>(rng.below(pairs))
                                  : even_odd[i % even_odd.size()];
        const bool quanta = rng.uniform() < cfg.quanta_probability;
        try {
          const MoveResult r = quanta ? quanta_swap(levels, k, targets.ptrs, *snapshot, rng.uniform())
                                      : standard_swap(levels, k, targets.ptrs, rng.uniform());
          counts.record(quanta ? MoveType::quanta_swap : MoveType::standard_swap, static_cast<int>(k), r);
        } catch (...) {
          rethrow_with_context(sweep, "swap " + std::to_string(k), levels[k].x);
        }
      }
    }
    diag.times.swaps += seconds_since(t_phase);

    // Exploration.
    t_phase = Clock::now();
    const bool adapting = sweep < freeze;
    if (cfg.exploration_enabled) {
      try {
        run_exploration(sweep, sweep, adapting);
      } catch (...) {
        rethrow_with_context(sweep, "exploration", hot.front().x);
      }
    }
    diag.times.exploration += seconds_since(t_phase);

    if (adapting) {
      const double gain = adaptation_gain(sweep);
      for (std::size_t k = 0; k < n_levels; ++k) {
        const MoveCounter& c = outcomes[k].local;
        if (c.proposed) log_scale[k] += gain * (c.rate() - cfg.target_acceptance);
      }
    }

    record_trace(diag, sweep, levels[0].x);
    diag.visits_target.push_back(label(levels[0].x));
    diag.visits_coldest.push_back(label(levels[coldest].x));
    diag.sweep_seconds.push_back(seconds_since(t_sweep));
  }

  for (double s : log_scale) diag.step_scales.push_back(std::exp(s));
  diag.times.total = seconds_since(t_start);
  result.diagnostics = std::move(diag);
  result.registry = std::move(registry);
  return result;
}

}  // namespace

std::vector<Vector> RunResult::samples() const {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < diagnostics.trace.size(); ++i) {
    if (diagnostics.trace_sweeps[i] >= diagnostics.burn_in) out.push_back(diagnostics.trace[i]);
  }
  return out;
}

RunResult alps_run(const RunConfig& cfg, const TargetBundle& target) {
  return run_annealed(cfg, target, "alps");
}

RunResult lais_run(const RunConfig& cfg, const TargetBundle& target) {
  RunConfig single = cfg;
  single.ladder.betas = {1.0};
  single.step_scales.resize(std::min<std::size_t>(single.step_scales.size(), 1));
  return run_annealed(single, target, "lais");
}

RunResult pt_run(const RunConfig& cfg, const TargetBundle& bundle) {
  cfg.validate();
  if (!bundle.target) throw ConfigError("no target");
  const TargetPtr& base = bundle.target;
  const Eigen::Index d = base->dim();
  const std::vector<double> betas = geometric_ladder(cfg.pt.ratio, cfg.pt.levels);
  const std::size_t n_levels = betas.size();
  const auto t_start = Clock::now();

  RunResult result;
  RunDiagnostics diag = start_diagnostics(cfg, "pt", d, betas);

  Vector x0 = Vector::Zero(d);
  if (cfg.initial_point) {
    if (static_cast<Eigen::Index>(cfg.initial_point->size()) != d) {
      throw ConfigError("initial_point has the wrong length");
    }
    x0 = Eigen::Map<const Vector>(cfg.initial_point->data(), d);
  }
  if (!std::isfinite(base->log_density(x0))) {
    throw ConfigError("target log-density is not finite at the initial point");
  }

  std::vector<std::unique_ptr<PowerTarget>> owned;
  std::vector<const TemperedDensity*> targets;
  std::vector<LevelState> levels(n_levels);
  std::vector<double> log_scale(n_levels);
  const double base_scale = cfg.step_scales.size() == 1 ? cfg.step_scales.front()
                                                         : 2.38 / std::sqrt(static_cast<double>(d));
  for (std::size_t k = 0; k < n_levels; ++k) {
    owned.push_back(std::make_unique<PowerTarget>(base, betas[k]));
    targets.push_back(owned.back().get());
    levels[k] = {x0, owned.back()->log_density(x0)};
    log_scale[k] = std::log(base_scale / std::sqrt(betas[k]));
  }
  const std::size_t pairs = n_levels - 1;
  const std::size_t swaps = cfg.swaps_per_sweep ? static_cast<std::size_t>(*cfg.swaps_per_sweep) : pairs;
  const std::uint64_t freeze = cfg.effective_freeze_sweep();
  auto label = [&](const Vector& x) { return bundle.labeler ? bundle.labeler(x) : -1; };

  std::vector<MoveCounter> outcomes(n_levels);
  for (std::uint64_t sweep = 0; sweep < cfg.samples; ++sweep) {
    const auto t_sweep = Clock::now();
    auto t_phase = Clock::now();
    for_each_level(n_levels, cfg.threads, [&](std::size_t k) {
      MoveCounter c;
      Stream rng(cfg.seed, purpose::kLevel + static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(sweep));
      const RwmConfig rc{std::exp(log_scale[k]), Preconditioner::none};
      try {
        for (int i = 0; i < cfg.within_steps; ++i) tally(c, rwm_step(levels[k], *targets[k], rc, rng));
      } catch (...) {
        rethrow_with_context(sweep, "level " + std::to_string(k), levels[k].x);
      }
      outcomes[k] = c;
    });
    CounterTable& counts = diag.counts_for(sweep);
    for (std::size_t k = 0; k < n_levels; ++k) counts.add(MoveType::rwm, static_cast<int>(k), outcomes[k]);
    diag.times.within += seconds_since(t_phase);

    t_phase = Clock::now();
    if (pairs > 0) {
      Stream rng(cfg.seed, purpose::kSwap, static_cast<std::uint32_t>(sweep));
      for (std::size_t i = 0; i < swaps; ++i) {
        const auto k = static_cast<std::size_t>(rng.below(pairs));
        try {
          counts.record(MoveType::standard_swap, static_cast<int>(k),
                        standard_swap(levels, k, targets, rng.uniform()));
        } catch (...) {
          rethrow_with_context(sweep, "swap " + std::to_string(k), levels[k].x);
        }
      }
    }
    diag.times.swaps += seconds_since(t_phase);

    if (sweep < freeze) {
      const double gain = adaptation_gain(sweep);
      for (std::size_t k = 0; k < n_levels; ++k) {
        if (outcomes[k].proposed) log_scale[k] += gain * (outcomes[k].rate() - cfg.target_acceptance);
      }
    }
    record_trace(diag, sweep, levels[0].x);
    diag.visits_target.push_back(label(levels[0].x));
    diag.sweep_seconds.push_back(seconds_since(t_sweep));
  }
  for (double s : log_scale) diag.step_scales.push_back(std::exp(s));
  diag.times.total = seconds_since(t_start);
  result.diagnostics = std::move(diag);
  return result;
}

std::vector<double> running_prob_estimate(std::span<const double> trace, double threshold,
                                          std::size_t burn_in, bool printed_normaliser) {
  if (burn_in >= trace.size()) throw ConfigError("running estimate: burn-in must be shorter than the trace");
  std::vector<double> out;
  out.reserve(trace.size() - burn_in);
  double hits = 0.0;
  for (std::size_t i = burn_in + 1; i <= trace.size(); ++i) {
    if (trace[i - 1] < threshold) hits += 1.0;
    const double denom = static_cast<double>(i - burn_in) - (printed_normaliser ? 1.0 : 0.0);
    if (denom > 0.0) out.push_back(hits / denom);
  }
  return out;
}

}  // namespace alps
