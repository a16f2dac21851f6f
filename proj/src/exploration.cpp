#include "alps/exploration.hpp"

#include "alps/error.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <sstream>

namespace alps {

void OptimizerConfig::validate() const {
  if (max_iterations <= 0 || !(gradient_tolerance > 0.0) || !(armijo > 0.0 && armijo < 1.0) ||
      !(shrink > 0.0 && shrink < 1.0) || !(finite_difference_step > 0.0)) {
    throw ConfigError("optimizer settings must be positive (armijo and shrink in (0, 1))");
  }
}

void ExplorationConfig::validate() const {
  if (!(beta_hot > 0.0 && beta_hot < 1.0)) throw ConfigError("exploration: beta_hot must lie in (0, 1)");
  if (steps < 0) throw ConfigError("exploration: steps must be non-negative");
  if (!(step_scale > 0.0)) throw ConfigError("exploration: step_scale must be positive");
  if (n_hot_chains < 1) throw ConfigError("exploration: need at least one hot chain");
  if (!(refresh_from_modes >= 0.0 && refresh_from_modes <= 1.0)) {
    throw ConfigError("exploration: refresh_from_modes must be a probability");
  }
  optimizer.validate();
}

Vector target_gradient(const TargetDensity& target, const Vector& x, double step) {
  if (target.has_gradient()) return target.gradient(x);
  return finite_difference_gradient(target, x, step);
}

OptimizeResult local_optimize(const TargetDensity& target, const Vector& x0,
                              const OptimizerConfig& cfg) {
  cfg.validate();
  const Eigen::Index d = x0.size();
  OptimizeResult res;
  res.x = x0;
  res.log_density = target.log_density(x0);
  if (!std::isfinite(res.log_density)) return res;

  // Minimise f = -log pi.
  Vector g = -target_gradient(target, res.x, cfg.finite_difference_step);
  if (!g.allFinite()) return res;
  res.gradient_norm = g.cwiseAbs().maxCoeff();
  if (res.gradient_norm < cfg.gradient_tolerance) {
    res.converged = true;
    return res;
  }

  Matrix h_inv = Matrix::Identity(d, d);
  bool scaled = false;
  if (cfg.hessian_start && target.has_hessian()) {
    const Matrix neg = -target.hessian(res.x);
    const auto chol = cholesky(0.5 * (neg + neg.transpose()));
    if (neg.allFinite() && !chol.failed_pivot) {
      h_inv = inverse_from_cholesky(chol.lower);
      scaled = true;
    }
  }

  bool reset_once = false;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    res.iterations = it;
    Vector dir = -h_inv * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      h_inv.setIdentity();
      dir = -g;
      slope = -g.squaredNorm();
    }
    double t = 1.0;
    Vector x_new;
    double f_new = 0.0;
    bool ok = false;
    const double f_old = -res.log_density;
    for (int ls = 0; ls < 200; ++ls) {
      x_new = res.x + t * dir;
      const double lp = target.log_density(x_new);
      f_new = -lp;
      if (std::isfinite(lp) && f_new <= f_old + cfg.armijo * t * slope) {
        ok = true;
        break;
      }
      t *= cfg.shrink;
    }
    if (!ok) {
      if (reset_once) return res;
      reset_once = true;
      h_inv.setIdentity();
      scaled = false;
      continue;
    }
    Vector g_new = -target_gradient(target, x_new, cfg.finite_difference_step);
    if (!g_new.allFinite()) return res;
    const Vector s = x_new - res.x;
    const Vector y = g_new - g;
    res.x = std::move(x_new);
    res.log_density = -f_new;
    g = std::move(g_new);
    res.gradient_norm = g.cwiseAbs().maxCoeff();
    if (res.gradient_norm < cfg.gradient_tolerance) {
      res.converged = true;
      return res;
    }
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        h_inv *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Vector hy = h_inv * y;
      h_inv += rho * ((1.0 + rho * y.dot(hy)) * (s * s.transpose()) -
                      (hy * s.transpose() + s * hy.transpose()));
    }
  }
  return res;
}

Matrix hessian_at(const TargetDensity& target, const Vector& mu, double step) {
  const Eigen::Index d = mu.size();
  Matrix h(d, d);
  if (target.has_hessian()) {
    h = target.hessian(mu);
  } else if (target.has_gradient()) {
    Vector xp = mu;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double hi = step * std::max(1.0, std::abs(mu[i]));
      xp[i] = mu[i] + hi;
      const Vector gp = target.gradient(xp);
      xp[i] = mu[i] - hi;
      const Vector gm = target.gradient(xp);
      xp[i] = mu[i];
      h.col(i) = (gp - gm) / (2.0 * hi);
    }
  } else {
    // Second differences of log pi need a larger step than gradients.
    const double s2 = std::sqrt(step) * 1e-1;
    Vector hs(d);
    for (Eigen::Index i = 0; i < d; ++i) hs[i] = s2 * std::max(1.0, std::abs(mu[i]));
    const double f0 = target.log_density(mu);
    Vector x = mu;
    for (Eigen::Index i = 0; i < d; ++i) {
      x[i] = mu[i] + hs[i];
      const double fp = target.log_density(x);
      x[i] = mu[i] - hs[i];
      const double fm = target.log_density(x);
      x[i] = mu[i];
      h(i, i) = (fp - 2.0 * f0 + fm) / (hs[i] * hs[i]);
      for (Eigen::Index j = 0; j < i; ++j) {
        auto f = [&](double si, double sj) {
          x[i] = mu[i] + si * hs[i];
          x[j] = mu[j] + sj * hs[j];
          const double v = target.log_density(x);
          x[i] = mu[i];
          x[j] = mu[j];
          return v;
        };
        h(i, j) = h(j, i) = (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / (4.0 * hs[i] * hs[j]);
      }
    }
  }
  h = 0.5 * (h + h.transpose());
  if (!h.allFinite()) {
    std::ostringstream msg;
    msg << "Hessian has non-finite entries at";
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        if (!std::isfinite(h(i, j))) msg << " (" << i << ", " << j << ")";
      }
    }
    throw NumericalError(msg.str());
  }
  return h;
}

MoveResult hot_step(LevelState& state, const PowerTarget& hot, double step_scale, Stream& rng) {
  return rwm_step(state, hot, RwmConfig{step_scale, Preconditioner::none}, rng);
}

namespace {

struct ChainOutcome {
  std::uint64_t proposals = 0;
  std::uint64_t accepts = 0;
  std::optional<OptimizeResult> opt;
};

ChainOutcome advance_chain(LevelState& chain, const ModeRegistry& registry, const PowerTarget& hot,
                           const TargetDensity& base, const ExplorationConfig& cfg,
                           std::uint64_t seed, std::size_t c, std::uint64_t sweep, bool optimise) {
  Stream rng(seed, purpose::kHot + static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(sweep));
  ChainOutcome out;
  if (cfg.refresh_from_modes > 0.0 && !registry.empty() && rng.uniform() < cfg.refresh_from_modes) {
    const auto j = rng.below(registry.size());
    chain.x = registry.mode(j).mu;
    chain.log_density = hot.log_density(chain.x);
  }
  for (int s = 0; s <= cfg.steps; ++s) {
    ++out.proposals;
    if (hot_step(chain, hot, cfg.step_scale, rng).accepted) ++out.accepts;
  }
  if (optimise) out.opt = local_optimize(base, chain.x, cfg.optimizer);
  return out;
}

}  // namespace

MfindResult mfind(std::vector<LevelState>& hot_chains, ModeRegistry& registry,
                  const TargetPtr& base, const ExplorationConfig& cfg, std::uint64_t seed,
                  std::uint64_t sweep, std::uint64_t iterations_before, bool optimise) {
  if (hot_chains.empty()) throw ConfigError("mfind: no hot chains");
  const PowerTarget hot(base, cfg.beta_hot);

  std::vector<ChainOutcome> outcomes(hot_chains.size());
  if (hot_chains.size() == 1) {
    outcomes[0] = advance_chain(hot_chains[0], registry, hot, *base, cfg, seed, 0, sweep, optimise);
  } else {
    std::vector<std::future<ChainOutcome>> jobs;
    for (std::size_t c = 0; c < hot_chains.size(); ++c) {
      jobs.push_back(std::async(std::launch::async, [&, c] {
        return advance_chain(hot_chains[c], registry, hot, *base, cfg, seed, c, sweep, optimise);
      }));
    }
    for (std::size_t c = 0; c < jobs.size(); ++c) outcomes[c] = jobs[c].get();
  }

  MfindResult res;
  const std::uint64_t iterations = iterations_before + static_cast<std::uint64_t>(cfg.steps + 1);
  for (std::size_t c = 0; c < outcomes.size(); ++c) {
    res.hot_proposals += outcomes[c].proposals;
    res.hot_accepts += outcomes[c].accepts;
    if (!outcomes[c].opt) continue;
    const OptimizeResult& opt = *outcomes[c].opt;
    DiscoveryEvent ev;
    ev.sweep = sweep;
    ev.iteration = iterations;
    ev.chain = c;
    ev.converged = opt.converged;
    ev.log_pi_at_mode = opt.log_density;
    if (!opt.converged) {
      ev.note = "optimizer did not converge";
      res.events.push_back(std::move(ev));
      continue;
    }
    try {
      const LaplaceCovariance cov = covariance_from_hessian(hessian_at(*base, opt.x, cfg.optimizer.finite_difference_step));
      ModeInfo cand;
      cand.mu = opt.x;
      cand.sigma = cov.sigma;
      cand.sigma_chol = cov.sigma_chol;
      cand.log_det_sigma = cov.log_det_sigma;
      cand.log_pi_at_mode = opt.log_density;
      ev.min_pseudo_distance = registry.min_pseudo_distance(cand);
      ev.found_new = registry.try_insert(cand);
      if (ev.found_new) res.found_new = true;
      if (cov.jittered) ev.note = "hessian jittered";
    } catch (const NumericalError& e) {
      ev.note = e.what();
    }
    res.events.push_back(std::move(ev));
  }
  return res;
}

}  // namespace alps
