#include "alps/pa_chain.hpp"

#include "alps/error.hpp"
#include "alps/special.hpp"

#include <cmath>

namespace alps {

namespace {

bool accept(double log_ratio, double u) { return std::log(u) <= log_ratio; }

// Proposal Cholesky factor for mode j at temperature beta, times step scale.
Matrix step_factor(const ModeRegistry& reg, std::size_t j, double beta, double scale) {
  return reg.mode(j).sigma_chol * (scale / std::sqrt(beta));
}

double rw_log_density(const Vector& to, const Vector& from, const ModeInfo& m, double beta,
                      double scale) {
  // N(to | from, scale^2 Sigma / beta)
  const double s2 = scale * scale;
  return gaussian_log_pdf(to, from, m.sigma_chol, m.log_det_sigma, beta / s2);
}

}  // namespace

void TemperatureLadder::validate() const {
  if (!(beta_hot > 0.0 && beta_hot < 1.0)) throw ConfigError("ladder: beta_hot must lie in (0, 1)");
  if (betas.empty() || betas.front() != 1.0) throw ConfigError("ladder: betas[0] must be 1");
  for (std::size_t i = 1; i < betas.size(); ++i) {
    if (!(betas[i] > betas[i - 1])) throw ConfigError("ladder: betas must strictly increase");
  }
}

MoveResult rwm_step(LevelState& state, const TemperedDensity& target, const RwmConfig& cfg,
                    const Vector& z, double u) {
  const ModeRegistry* reg = target.registry();
  const bool local = cfg.preconditioner != Preconditioner::none && reg && !reg->empty();
  const double beta = target.beta();

  Vector y;
  std::size_t from_mode = 0;
  if (local) {
    from_mode = allocate_mode(state.x, beta, *reg);
    y = state.x + step_factor(*reg, from_mode, beta, cfg.step_scale) * z;
  } else {
    y = state.x + cfg.step_scale * z;
  }

  const double ly = target.log_density(y);
  MoveResult r;
  if (!std::isfinite(ly)) {
    r.finite = false;
    r.log_ratio = -std::numeric_limits<double>::infinity();
    return r;
  }
  r.log_ratio = ly - state.log_density;
  if (local && cfg.preconditioner == Preconditioner::mode_local_corrected) {
    const std::size_t to_mode = allocate_mode(y, beta, *reg);
    if (to_mode != from_mode) {
      r.log_ratio += rw_log_density(state.x, y, reg->mode(to_mode), beta, cfg.step_scale) -
                     rw_log_density(y, state.x, reg->mode(from_mode), beta, cfg.step_scale);
    }
  }
  if (accept(r.log_ratio, u)) {
    state.x = std::move(y);
    state.log_density = ly;
    r.accepted = true;
  }
  return r;
}

MoveResult rwm_step(LevelState& state, const TemperedDensity& target, const RwmConfig& cfg,
                    Stream& rng) {
  Vector z(state.x.size());
  for (auto& v : z) v = rng.normal();
  return rwm_step(state, target, cfg, z, rng.uniform());
}

Vector quanta_transform(const Vector& x, double beta_from, double beta_to, const Vector& mu) {
  return std::sqrt(beta_from / beta_to) * (x - mu) + mu;
}

MoveResult quanta_swap(std::vector<LevelState>& levels, std::size_t k,
                       std::span<const TemperedDensity* const> targets,
                       const ModeRegistry& registry, double u) {
  if (k + 1 >= levels.size() || targets.size() != levels.size()) {
    throw ConfigError("quanta_swap: level index out of range");
  }
  const TemperedDensity& lo = *targets[k];
  const TemperedDensity& hi = *targets[k + 1];
  const std::size_t m1 = allocate_mode(levels[k].x, lo.beta(), registry);
  const std::size_t m2 = allocate_mode(levels[k + 1].x, hi.beta(), registry);
  Vector yk = quanta_transform(levels[k].x, lo.beta(), hi.beta(), registry.mode(m1).mu);
  Vector yk1 = quanta_transform(levels[k + 1].x, hi.beta(), lo.beta(), registry.mode(m2).mu);

  const double l_hi_yk = hi.log_density(yk);
  const double l_lo_yk1 = lo.log_density(yk1);
  MoveResult r;
  if (!std::isfinite(l_hi_yk) || !std::isfinite(l_lo_yk1)) {
    r.finite = false;
    r.log_ratio = -std::numeric_limits<double>::infinity();
    return r;
  }
  r.log_ratio = (l_hi_yk + l_lo_yk1) - (levels[k].log_density + levels[k + 1].log_density);
  if (accept(r.log_ratio, u)) {
    levels[k] = {std::move(yk1), l_lo_yk1};
    levels[k + 1] = {std::move(yk), l_hi_yk};
    r.accepted = true;
  }
  return r;
}

MoveResult standard_swap(std::vector<LevelState>& levels, std::size_t k,
                         std::span<const TemperedDensity* const> targets, double u) {
  if (k + 1 >= levels.size() || targets.size() != levels.size()) {
    throw ConfigError("standard_swap: level index out of range");
  }
  const double l_lo_x1 = targets[k]->log_density(levels[k + 1].x);
  const double l_hi_x0 = targets[k + 1]->log_density(levels[k].x);
  MoveResult r;
  if (!std::isfinite(l_lo_x1) || !std::isfinite(l_hi_x0)) {
    r.finite = false;
    r.log_ratio = -std::numeric_limits<double>::infinity();
    return r;
  }
  r.log_ratio = (l_lo_x1 + l_hi_x0) - (levels[k].log_density + levels[k + 1].log_density);
  if (accept(r.log_ratio, u)) {
    std::swap(levels[k].x, levels[k + 1].x);
    levels[k].log_density = l_lo_x1;
    levels[k + 1].log_density = l_hi_x0;
    r.accepted = true;
  }
  return r;
}

Vector mixture_propose(const ModeRegistry& registry, double beta, Stream& rng) {
  if (registry.empty()) throw NoModesError();
  const auto& lw = registry.log_weights();
  const double u = rng.uniform();
  std::size_t j = 0;
  double cum = 0.0;
  for (; j + 1 < lw.size(); ++j) {
    cum += std::exp(lw[j]);
    if (u < cum) break;
  }
  const ModeInfo& m = registry.mode(j);
  Vector z(m.mu.size());
  for (auto& v : z) v = rng.normal();
  return m.mu + (m.sigma_chol * z) / std::sqrt(beta);
}

double mixture_log_density(const ModeRegistry& registry, double beta, const Vector& y) {
  if (registry.empty()) throw NoModesError();
  const auto& lw = registry.log_weights();
  std::vector<double> terms(registry.size());
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const ModeInfo& m = registry.mode(j);
    terms[j] = lw[j] + gaussian_log_pdf(y, m.mu, m.sigma_chol, m.log_det_sigma, beta);
  }
  return logsumexp(terms);
}

MoveResult independence_step(LevelState& state, const TemperedDensity& target,
                             const ModeRegistry& registry, const Vector& y, double u) {
  const double beta = target.beta();
  const double ly = target.log_density(y);
  MoveResult r;
  if (!std::isfinite(ly)) {
    r.finite = false;
    r.log_ratio = -std::numeric_limits<double>::infinity();
    return r;
  }
  const double qx = mixture_log_density(registry, beta, state.x);
  const double qy = mixture_log_density(registry, beta, y);
  r.log_ratio = (ly - state.log_density) + (qx - qy);
  if (!std::isfinite(r.log_ratio)) {
    r.finite = false;
    return r;
  }
  if (accept(r.log_ratio, u)) {
    state.x = y;
    state.log_density = ly;
    r.accepted = true;
  }
  return r;
}

LeapResult mode_leap_step(LevelState& state, const TemperedDensity& target,
                          const ModeRegistry& registry, const RwmConfig& local, Stream& rng) {
  if (registry.empty()) throw NoModesError();
  LeapResult out;
  if (rng.uniform() < 0.5) {
    out.kind = LeapKind::local;
    out.move = rwm_step(state, target, local, rng);
    return out;
  }
  out.kind = LeapKind::leap;
  const Vector y = mixture_propose(registry, target.beta(), rng);
  out.move = independence_step(state, target, registry, y, rng.uniform());
  return out;
}

}  // namespace alps
