#include "alps/error.hpp"
#include "alps/exploration.hpp"
#include "alps/scaling.hpp"
#include "alps/targets/gaussian.hpp"
#include "alps/targets/skew_normal.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace alps;
using namespace alps::test;

namespace {

FunctionTarget rosenbrock(bool with_gradient) {
  auto f = [](const Vector& v) {
    const double a = 1 - v[0], b = v[1] - v[0] * v[0];
    return -(a * a + 100 * b * b);
  };
  FunctionTarget::Gradient g;
  if (with_gradient) {
    g = [](const Vector& v) {
      const double b = v[1] - v[0] * v[0];
      return vec({2 * (1 - v[0]) + 400 * v[0] * b, -200 * b});
    };
  }
  return FunctionTarget(2, f, g);
}

}  // namespace

TEST_CASE("optimiser on quadratics") {
  const Vector a = vec({1.5, -2.0, 0.25});
  const FunctionTarget quad(3, [a](const Vector& x) { return -0.5 * (x - a).squaredNorm(); },
                            [a](const Vector& x) -> Vector { return -(x - a); });
  for (const Vector& x0 : {Vector(vec({10, 10, 10})), Vector(vec({-3, 0, 7}))}) {
    const auto r = local_optimize(quad, x0);
    CHECK(r.converged);
    CHECK((r.x - a).norm() < 1e-8);
  }
  const auto at_max = local_optimize(quad, a);
  CHECK(at_max.converged);
  CHECK(at_max.iterations == 0);
  CHECK(at_max.x == a);

  // No gradient: central differences.
  const FunctionTarget quad_fd(3, [a](const Vector& x) { return -0.5 * (x - a).squaredNorm(); });
  const auto r = local_optimize(quad_fd, Vector::Zero(3));
  CHECK(r.converged);
  CHECK((r.x - a).norm() < 1e-7);
}

TEST_CASE("optimiser on the Rosenbrock valley") {
  // Grid oracle: the maximiser on a fine lattice around (1, 1).
  const auto t = rosenbrock(true);
  double best = -INFINITY;
  Vector arg(2);
  for (int i = -100; i <= 100; ++i)
    for (int j = -100; j <= 100; ++j) {
      const Vector v = vec({1 + i * 1e-4, 1 + j * 1e-4});
      if (t.log_density(v) > best) {
        best = t.log_density(v);
        arg = v;
      }
    }
  CHECK((arg - vec({1, 1})).norm() < 1e-12);

  OptimizerConfig cfg;
  cfg.gradient_tolerance = 1e-10;
  for (bool grad : {true, false}) {
    const auto r = local_optimize(rosenbrock(grad), vec({-1.2, 1}), cfg);
    CHECK((r.x - arg).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("optimiser failure modes") {
  const FunctionTarget cliff(1, [](const Vector& x) { return x[0] > 1 ? -INFINITY : x[0]; });
  const auto r = local_optimize(cliff, vec({0.0}));
  CHECK_FALSE(r.converged);
  CHECK(std::isfinite(r.log_density));
  OptimizerConfig bad;
  bad.armijo = 2.0;
  CHECK_THROWS_AS(local_optimize(cliff, vec({0}), bad), ConfigError);
}

TEST_CASE("hessian extraction") {
  const Matrix a = diag({2.0, 0.5});
  const FunctionTarget f(2, [a](const Vector& x) { return -0.5 * x.dot(a * x); });
  CHECK((hessian_at(f, vec({0.3, -0.4})) + a).cwiseAbs().maxCoeff() < 1e-5);
  const FunctionTarget g(2, [a](const Vector& x) { return -0.5 * x.dot(a * x); },
                         [a](const Vector& x) -> Vector { return -a * x; });
  CHECK((hessian_at(g, vec({0.3, -0.4})) + a).cwiseAbs().maxCoeff() < 1e-8);
  const GaussianTarget id(Vector::Zero(4), Matrix::Identity(4, 4));
  CHECK((hessian_at(id, Vector::Zero(4)) + Matrix::Identity(4, 4)).norm() == 0.0);
  const FunctionTarget iso(3, [](const Vector& x) { return -0.5 * x.squaredNorm(); });
  CHECK((hessian_at(iso, Vector::Zero(3)) + Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-5);

  const FunctionTarget broken(2, [](const Vector& x) { return x[1] > 0 ? NAN : -x.squaredNorm(); });
  CHECK_THROWS_AS(hessian_at(broken, Vector::Zero(2)), NumericalError);
}

TEST_CASE("hessian of a skew-normal at its mode") {
  const CenteredSkewNormal h(3.0);
  const FunctionTarget f(1, [&](const Vector& x) { return h(x[0]); });
  const double oracle = richardson_derivative(h, 2);
  const double fd = hessian_at(f, vec({0.0}))(0, 0);
  CHECK(fd == doctest::Approx(oracle).epsilon(1e-4));
  const auto opt = local_optimize(f, vec({1.0}));
  CHECK(opt.converged);
  CHECK(std::abs(opt.x[0]) < 1e-6);
}

TEST_CASE("hot steps") {
  const auto base = std::make_shared<FunctionTarget>(1, [](const Vector& x) { return -1e5 * x.squaredNorm(); });
  const PowerTarget hot(base, 1e-12);
  LevelState s{vec({0}), hot.log_density(vec({0}))};
  Stream rng(1, purpose::kHot, 0);
  int acc = 0;
  for (int i = 0; i < 1000; ++i) acc += hot_step(s, hot, 3.0, rng).accepted;
  CHECK(acc >= 995);
  LevelState z{vec({0.5}), hot.log_density(vec({0.5}))};
  CHECK(rwm_step(z, hot, RwmConfig{1.0, Preconditioner::none}, Vector::Zero(1), 0.99999).accepted);
}

TEST_CASE("mfind on a Gaussian") {
  Stream rng(2, purpose::kTest, 40);
  const Matrix s = random_spd(3, rng);
  const Vector mu = vec({1, -2, 3});
  const auto base = std::make_shared<GaussianTarget>(mu, s);
  ModeRegistry reg(3);
  std::vector<LevelState> hot{{Vector::Zero(3), 0.5 * base->log_density(Vector::Zero(3))}};
  ExplorationConfig cfg;
  cfg.beta_hot = 0.5;
  const auto r = mfind(hot, reg, base, cfg, 1, 0, 0);
  CHECK(r.found_new);
  CHECK(r.hot_proposals == static_cast<std::uint64_t>(cfg.steps + 1));
  REQUIRE(reg.size() == 1);
  CHECK((reg.mode(0).mu - mu).norm() < 1e-6);
  CHECK((reg.mode(0).sigma - s).norm() < 1e-6);
  CHECK(reg.version() == 1);
  REQUIRE(r.events.size() == 1);
  CHECK(r.events[0].found_new);

  for (std::uint64_t sweep = 1; sweep < 20; ++sweep) {
    const auto again = mfind(hot, reg, base, cfg, 1, sweep, 0);
    CHECK_FALSE(again.found_new);
    CHECK(reg.version() == 1);
  }
  const auto quiet = mfind(hot, reg, base, cfg, 1, 99, 0, false);
  CHECK(quiet.events.empty());
}

TEST_CASE("mfind with several hot chains is deterministic") {
  auto base = std::make_shared<GaussianMixtureTarget>(std::vector<GaussianComponent>{
      {0.5, vec({-5, 0}), Matrix::Identity(2, 2)}, {0.5, vec({5, 0}), Matrix::Identity(2, 2)}});
  ExplorationConfig cfg;
  cfg.beta_hot = 0.05;
  cfg.n_hot_chains = 3;
  cfg.step_scale = 4.0;
  auto run = [&] {
    ModeRegistry reg(2);
    std::vector<LevelState> hot(3, LevelState{Vector::Zero(2), 0.05 * base->log_density(Vector::Zero(2))});
    std::uint64_t versions = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto before = reg.version();
      const auto r = mfind(hot, reg, base, cfg, 7, s, s * 6);
      CHECK(reg.version() - before == static_cast<std::uint64_t>(std::count_if(
                                          r.events.begin(), r.events.end(), [](const auto& e) { return e.found_new; })));
      versions = reg.version();
    }
    return std::make_pair(versions, hot[2].x);
  };
  const auto a = run(), b = run();
  CHECK(a.first == 2);
  CHECK(a == b);
}

TEST_CASE("exploration finds the four benchmark modes") {
  const auto base = std::make_shared<SkewNormalMixtureTarget>(make_four_mode_benchmark());
  ExplorationConfig cfg;
  cfg.beta_hot = 5e-6;
  cfg.steps = 5;
  cfg.step_scale = 10.0;
  for (std::uint64_t seed : {1, 4}) {
    ModeRegistry reg(20);
    const Vector x0 = Vector::Zero(20);
    std::vector<LevelState> hot{{x0, cfg.beta_hot * base->log_density(x0)}};
    std::uint64_t iterations = 0;
    std::set<std::size_t> labels;
    for (std::uint64_t s = 0; iterations < 20000 && labels.size() < 4; ++s) {
      mfind(hot, reg, base, cfg, seed, s, iterations);
      iterations += static_cast<std::uint64_t>(cfg.steps + 1);
      labels.clear();
      for (const auto& m : reg.modes()) labels.insert(base->nearest_component(m.mu));
    }
    CHECK(labels.size() == 4);
    CHECK(reg.size() == 4);
  }
}
