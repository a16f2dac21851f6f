#include "alps/error.hpp"
#include "alps/hat_target.hpp"
#include "alps/pa_chain.hpp"
#include "alps/targets/gaussian.hpp"
#include "test_helpers.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace alps;
using namespace alps::test;

namespace {

using Span = std::span<const TemperedDensity* const>;

struct GaussianSetup {
  TargetPtr base;
  RegistrySnapshot registry;
};

GaussianSetup registered_gaussian(Eigen::Index d, std::uint32_t salt) {
  Stream rng(21, purpose::kTest, salt);
  const Matrix s = random_spd(d, rng);
  const Vector mu = random_vector(d, rng, 3.0);
  auto base = std::make_shared<GaussianTarget>(mu, s);
  auto r = std::make_shared<ModeRegistry>(d);
  r->try_insert(ModeInfo::from_covariance(mu, s, base->log_density(mu)));
  return {base, r};
}

LevelState at(const TemperedDensity& t, Vector x) {
  const double l = t.log_density(x);
  return {std::move(x), l};
}

}  // namespace

TEST_CASE("ladder validation") {
  TemperatureLadder ok{0.01, {1, 4, 16}};
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.coldest() == 2);
  CHECK(ok.beta_max() == 16);
  CHECK_THROWS_AS((TemperatureLadder{0.01, {2, 4}}.validate()), ConfigError);
  CHECK_THROWS_AS((TemperatureLadder{0.01, {1, 4, 4}}.validate()), ConfigError);
  CHECK_THROWS_AS((TemperatureLadder{1.0, {1, 4}}.validate()), ConfigError);
  CHECK_THROWS_AS((TemperatureLadder{0.1, {}}.validate()), ConfigError);
}

TEST_CASE("rwm step edge cases") {
  const auto g = registered_gaussian(2, 1);
  const HatTarget hat(g.base, g.registry, 3.0);
  for (auto pc : {Preconditioner::none, Preconditioner::mode_local_frozen, Preconditioner::mode_local_corrected}) {
    LevelState s = at(hat, g.registry->mode(0).mu + vec({0.3, -0.2}));
    const Vector x0 = s.x;
    const auto r = rwm_step(s, hat, RwmConfig{1.0, pc}, Vector::Zero(2), 0.999999);
    CHECK(r.accepted);
    CHECK(r.log_ratio == 0.0);
    CHECK(s.x == x0);
  }
  const TruncatedHatTarget trunc(hat, 1.0);
  LevelState s = at(trunc, g.registry->mode(0).mu);
  const auto r = rwm_step(s, trunc, RwmConfig{1.0, Preconditioner::none}, Vector::Constant(2, 100.0), 1e-12);
  CHECK_FALSE(r.accepted);
  CHECK_FALSE(r.finite);
  CHECK(s.x == g.registry->mode(0).mu);
}

TEST_CASE("rwm acceptance on a standard normal") {
  const auto base = std::make_shared<GaussianTarget>(vec({0}), Matrix::Constant(1, 1, 1.0));
  const PowerTarget t(base, 1.0);
  const double scale = 2.4;
  // Stationary acceptance of N(0, s^2) steps on N(0, 1): (2 / pi) atan(2 / s).
  const double oracle = 2.0 / std::numbers::pi * std::atan(2.0 / scale);
  LevelState s = at(t, vec({0}));
  Stream rng(1, purpose::kTest, 30);
  int acc = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc += rwm_step(s, t, RwmConfig{scale, Preconditioner::none}, rng).accepted;
  CHECK(static_cast<double>(acc) / n == doctest::Approx(0.44).epsilon(0.03 / 0.44));
  CHECK(std::abs(static_cast<double>(acc) / n - oracle) < 0.01);
}

TEST_CASE("corrected preconditioner keeps a bimodal target") {
  // 0.5 N(-1.5, 0.3^2) + 0.5 N(1.5, 1.5^2), both modes registered, beta = 1.
  auto base = std::make_shared<GaussianMixtureTarget>(std::vector<GaussianComponent>{
      {0.5, vec({-1.5}), Matrix::Constant(1, 1, 0.09)}, {0.5, vec({1.5}), Matrix::Constant(1, 1, 2.25)}});
  auto r = std::make_shared<ModeRegistry>(1, 0.1);
  r->try_insert(mode1d(-1.5, 0.09, base->log_density(vec({-1.5}))));
  r->try_insert(mode1d(1.5, 2.25, base->log_density(vec({1.5}))));
  REQUIRE(r->size() == 2);
  const HatTarget hat(base, r, 1.0);
  auto mass_left = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double x) { return std::exp(base->log_density(vec({x}))); }, -30.0, 0.0, 15, 1e-12);

  LevelState s = at(hat, vec({0.0}));
  Stream rng(2, purpose::kTest, 31);
  const int batches = 200, per = 4000;
  std::vector<double> means;
  for (int b = 0; b < batches; ++b) {
    int left = 0;
    for (int i = 0; i < per; ++i) {
      rwm_step(s, hat, RwmConfig{1.6, Preconditioner::mode_local_corrected}, rng);
      left += s.x[0] < 0.0;
    }
    means.push_back(static_cast<double>(left) / per);
  }
  double m = 0, v = 0;
  for (double x : means) m += x / batches;
  for (double x : means) v += (x - m) * (x - m) / (batches - 1);
  CHECK(std::abs(m - mass_left) < 4.0 * std::sqrt(v / batches) + 1e-3);
}

TEST_CASE("quanta transform") {
  const Vector x = vec({1.0, -2.0, 0.5});
  const Vector mu = vec({0.2, 0.1, -0.3});
  CHECK(quanta_transform(x, 3.0, 3.0, mu) == x);
  CHECK((quanta_transform(x, 1.0, 4.0, Vector::Zero(3)) - x / 2).norm() == 0.0);
  CHECK((quanta_transform(quanta_transform(x, 2.0, 37.0, mu), 37.0, 2.0, mu) - x).norm() < 1e-12);
}

TEST_CASE("swaps at mode points and on exact Gaussians") {
  const auto g = registered_gaussian(5, 2);
  const HatTarget t0(g.base, g.registry, 1.0), t1(g.base, g.registry, 16.0);
  const TemperedDensity* targets[] = {&t0, &t1};
  const Vector& mu = g.registry->mode(0).mu;

  std::vector<LevelState> lv{at(t0, mu), at(t1, mu)};
  CHECK(quanta_swap(lv, 0, Span(targets), *g.registry, 0.999999).accepted);
  CHECK(std::abs(quanta_swap(lv, 0, Span(targets), *g.registry, 0.5).log_ratio) < 1e-12);

  Stream rng(3, purpose::kTest, 32);
  double worst = 0.0;
  int accepted = 0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<LevelState> l{at(t0, mu + random_vector(5, rng, 1.5)), at(t1, mu + random_vector(5, rng, 0.4))};
    const auto r = quanta_swap(l, 0, Span(targets), *g.registry, rng.uniform());
    worst = std::max(worst, std::abs(r.log_ratio));
    accepted += r.accepted;
  }
  CHECK(worst < 1e-9);
  CHECK(accepted == 10000);
}

TEST_CASE("quanta swap exchanges transformed points") {
  const auto g = registered_gaussian(2, 3);
  const HatTarget t0(g.base, g.registry, 1.0), t1(g.base, g.registry, 4.0);
  const TemperedDensity* targets[] = {&t0, &t1};
  const Vector& mu = g.registry->mode(0).mu;
  const Vector x0 = mu + vec({1.0, 0.5}), x1 = mu + vec({-0.2, 0.3});
  std::vector<LevelState> l{at(t0, x0), at(t1, x1)};
  REQUIRE(quanta_swap(l, 0, Span(targets), *g.registry, 0.5).accepted);
  CHECK((l[0].x - quanta_transform(x1, 4.0, 1.0, mu)).norm() < 1e-14);
  CHECK((l[1].x - quanta_transform(x0, 1.0, 4.0, mu)).norm() < 1e-14);
  CHECK(l[0].log_density == t0.log_density(l[0].x));
  CHECK(l[1].log_density == t1.log_density(l[1].x));
}

TEST_CASE("standard swap") {
  const auto g = registered_gaussian(2, 4);
  const HatTarget t0(g.base, g.registry, 1.0), t1(g.base, g.registry, 8.0), t1b(g.base, g.registry, 1.0);
  const TemperedDensity* targets[] = {&t0, &t1};
  const Vector x = g.registry->mode(0).mu + vec({0.7, -1.1});
  std::vector<LevelState> same{at(t0, x), at(t1, x)};
  CHECK(standard_swap(same, 0, Span(targets), 0.999999).accepted);

  const TemperedDensity* flat[] = {&t0, &t1b};
  Stream rng(4, purpose::kTest, 33);
  for (int i = 0; i < 50; ++i) {
    const Vector a = x + random_vector(2, rng), b = x + random_vector(2, rng);
    std::vector<LevelState> l1{at(t0, a), at(t1b, b)};
    std::vector<LevelState> l2 = l1;
    const auto rs = standard_swap(l1, 0, Span(flat), 0.999999);
    const auto rq = quanta_swap(l2, 0, Span(flat), *g.registry, 0.999999);
    CHECK(rs.accepted);
    CHECK(rs.log_ratio == doctest::Approx(rq.log_ratio));
  }
}

TEST_CASE("standard swap acceptance against quadrature") {
  const auto base = std::make_shared<GaussianTarget>(vec({0}), Matrix::Constant(1, 1, 1.0));
  const PowerTarget t0(base, 1.0), t1(base, 2.0);
  const TemperedDensity* targets[] = {&t0, &t1};
  // E[min(1, exp((b1 - b0)(x1^2 - x0^2) / 2))], x0 ~ N(0, 1), x1 ~ N(0, 1/2).
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double s1 = std::sqrt(0.5);
  const double oracle = GK::integrate(
      [&](double a) {
        return GK::integrate(
            [&](double b) {
              const double w = std::exp(-0.5 * a * a - 0.5 * b * b / 0.5) / (2 * std::numbers::pi * s1);
              return w * std::min(1.0, std::exp(0.5 * (b * b - a * a)));
            },
            -12.0, 12.0, 15, 1e-12);
      },
      -12.0, 12.0, 15, 1e-12);
  Stream rng(5, purpose::kTest, 34);
  const int n = 100000;
  int acc = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<LevelState> l{at(t0, vec({rng.normal()})), at(t1, vec({s1 * rng.normal()}))};
    acc += standard_swap(l, 0, Span(targets), rng.uniform()).accepted;
  }
  CHECK(std::abs(static_cast<double>(acc) / n - oracle) < 0.01);
}

TEST_CASE("mixture proposal") {
  const auto g = registered_gaussian(3, 5);
  const auto& m = g.registry->mode(0);
  Stream rng(6, purpose::kTest, 35);
  const int n = 100000;
  const double beta = 1.0;
  Vector mean = Vector::Zero(3);
  Matrix cov = Matrix::Zero(3, 3);
  std::vector<Vector> draws;
  for (int i = 0; i < n; ++i) draws.push_back(mixture_propose(*g.registry, beta, rng));
  for (const auto& y : draws) mean += y / n;
  for (const auto& y : draws) cov += (y - mean) * (y - mean).transpose() / (n - 1);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(mean[i] - m.mu[i]) < 3.0 * std::sqrt(m.sigma(i, i) / n));
    for (int j = 0; j < 3; ++j) {
      const double se = std::sqrt((m.sigma(i, i) * m.sigma(j, j) + m.sigma(i, j) * m.sigma(i, j)) / n);
      CHECK(std::abs(cov(i, j) - m.sigma(i, j)) < 3.5 * se);
    }
  }

  ModeRegistry two(1);
  two.try_insert(mode1d(0, 1, std::log(2.0)));
  two.try_insert(mode1d(10, 1, 0.0));
  const double ref = std::log(2.0 / 3.0 * std::exp(std_normal_log_pdf(0)) + 1.0 / 3.0 * std::exp(std_normal_log_pdf(10)));
  CHECK(mixture_log_density(two, 1.0, vec({0})) == doctest::Approx(ref).epsilon(1e-14));
  CHECK(mixture_log_density(two, 1.0, vec({0})) == doctest::Approx(std::log(2.0 / 3) - 0.5 * std::log(2 * std::numbers::pi)));
  CHECK(mixture_log_density(two, 4.0, vec({10})) ==
        doctest::Approx(two.log_weights()[1] + gaussian_log_pdf(vec({10}), vec({10}), two.mode(1).sigma_chol, 0.0, 4.0)));
}

TEST_CASE("mode leap on an exact Gaussian") {
  const auto g = registered_gaussian(5, 6);
  const HatTarget t(g.base, g.registry, 4096.0);
  Stream rng(7, purpose::kTest, 36);
  LevelState s = at(t, g.registry->mode(0).mu);
  double worst = 0.0;
  int leaps = 0;
  for (int i = 0; i < 10000; ++i) {
    const Vector y = mixture_propose(*g.registry, 4096.0, rng);
    const auto r = independence_step(s, t, *g.registry, y, rng.uniform());
    worst = std::max(worst, std::abs(r.log_ratio));
    leaps += r.accepted;
  }
  CHECK(worst < 1e-8);
  CHECK(leaps == 10000);

  const Vector x = s.x;
  CHECK(independence_step(s, t, *g.registry, x, 0.999999).accepted);

  int local = 0, leap = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto r = mode_leap_step(s, t, *g.registry, RwmConfig{}, rng);
    (r.kind == LeapKind::local ? local : leap)++;
  }
  CHECK(std::abs(local - 1000) < 150);
  ModeRegistry empty(5);
  CHECK_THROWS_AS(mode_leap_step(s, t, empty, RwmConfig{}, rng), NoModesError);
}

TEST_CASE("full sweep keeps a 1-d standard normal") {
  const auto base = std::make_shared<GaussianTarget>(vec({0}), Matrix::Constant(1, 1, 1.0));
  auto r = std::make_shared<ModeRegistry>(1);
  r->try_insert(mode1d(0, 1, base->log_density(vec({0}))));
  const HatTarget t0(base, r, 1.0), t1(base, r, 4.0);
  const TemperedDensity* targets[] = {&t0, &t1};
  std::vector<LevelState> lv{at(t0, vec({0})), at(t1, vec({0}))};
  const int sweeps = 200000;
  double sum = 0, sum2 = 0;
  for (int s = 0; s < sweeps; ++s) {
    Stream l0(9, purpose::kLevel, s), l1(9, purpose::kLevel + 1, s), sw(9, purpose::kSwap, s);
    rwm_step(lv[0], t0, RwmConfig{2.4}, l0);
    mode_leap_step(lv[1], t1, *r, RwmConfig{1.2}, l1);
    if (sw.uniform() < 0.5) quanta_swap(lv, 0, Span(targets), *r, sw.uniform());
    else standard_swap(lv, 0, Span(targets), sw.uniform());
    sum += lv[0].x[0];
    sum2 += lv[0].x[0] * lv[0].x[0];
  }
  const double mean = sum / sweeps;
  CHECK(std::abs(mean) < 0.02);
  const double var = sum2 / sweeps - mean * mean;
  CHECK(var > 0.96);
  CHECK(var < 1.04);
}

TEST_CASE("kernels are reproducible") {
  const auto g = registered_gaussian(3, 7);
  const HatTarget t(g.base, g.registry, 2.0);
  auto run = [&] {
    LevelState s = at(t, g.registry->mode(0).mu);
    Stream rng(42, purpose::kLevel, 0);
    for (int i = 0; i < 500; ++i) mode_leap_step(s, t, *g.registry, RwmConfig{0.8}, rng);
    return s.x;
  };
  CHECK(run() == run());
}
