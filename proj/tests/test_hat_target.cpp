#include "alps/error.hpp"
#include "alps/hat_target.hpp"
#include "alps/special.hpp"
#include "alps/targets/gaussian.hpp"
#include "test_helpers.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace alps;
using namespace alps::test;

namespace {

const double kLog2Pi = std::log(2 * std::numbers::pi);

RegistrySnapshot snapshot_of(std::initializer_list<ModeInfo> modes, Eigen::Index d) {
  auto r = std::make_shared<ModeRegistry>(d, 1e-9);
  for (const auto& m : modes) r->try_insert(m);
  return r;
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

// Two well separated 1-d Gaussians with unequal weights and scales.
TargetPtr bimodal_base() {
  return std::make_shared<GaussianMixtureTarget>(std::vector<GaussianComponent>{
      {0.3, vec({-6.0}), Matrix::Constant(1, 1, 1.0)}, {0.7, vec({6.0}), Matrix::Constant(1, 1, 4.0)}});
}

}  // namespace

TEST_CASE("allocation") {
  const auto one = snapshot_of({mode1d(3, 2, 0)}, 1);
  for (double x : {-100.0, 0.0, 3.0, 50.0})
    for (double b : {1.0, 7.0}) CHECK(allocate_mode(vec({x}), b, *one) == 0);

  auto two = std::make_shared<ModeRegistry>(3, 1e-9);
  two->try_insert(ModeInfo::from_covariance(vec({-1, 0, 0}), Matrix::Identity(3, 3), 0));
  two->try_insert(ModeInfo::from_covariance(vec({1, 0, 0}), Matrix::Identity(3, 3), 0));
  CHECK(two->size() == 2);
  CHECK(allocate_mode(vec({-1, 0, 0}), 1.0, *two) == 0);
  CHECK(allocate_mode(vec({1, 0, 0}), 1.0, *two) == 1);
  CHECK(allocate_mode(vec({0, 0, 0}), 1.0, *two) == 0);  // tie goes to the lower index

  // Equal weights require pi(mu_1) |Sigma_1|^{1/2} = pi(mu_2) |Sigma_2|^{1/2}.
  const auto r = snapshot_of({mode1d(0, 4, -0.5 * std::log(4.0)), mode1d(4, 1, 0)}, 1);
  CHECK(std::exp(r->log_weights()[0]) == doctest::Approx(0.5));
  const double l0 = std::log(0.5) - 0.5 * std::log(2 * std::numbers::pi * 4) - 2.5 * 2.5 / 8;
  const double l1 = std::log(0.5) - 0.5 * kLog2Pi - 1.5 * 1.5 / 2;
  CHECK(l0 == doctest::Approx(std::log(0.5) - 2.40).epsilon(5e-3));
  CHECK(l1 == doctest::Approx(std::log(0.5) - 2.04).epsilon(5e-3));
  CHECK(allocate_mode(vec({2.5}), 1.0, *r) == 1);

  const auto pair = allocate_pair(vec({2.5}), 1.0, *r);
  CHECK(pair.at_beta == 1);
  CHECK(pair.at_one == 1);
  CHECK(pair.quad_at_beta == doctest::Approx(2.25));

  ModeRegistry empty(1);
  CHECK_THROWS_AS(allocate_mode(vec({0}), 1.0, empty), NoModesError);
}

TEST_CASE("hat target at beta one is the base") {
  const auto base = bimodal_base();
  const auto r = snapshot_of({mode1d(-6, 1, base->log_density(vec({-6}))), mode1d(6, 4, base->log_density(vec({6})))}, 1);
  const HatTarget hat(base, r, 1.0);
  Stream rng(1, purpose::kTest, 10);
  for (int i = 0; i < 1000; ++i) {
    const Vector x = random_vector(1, rng, 8.0);
    CHECK(hat.log_density(x) == base->log_density(x));
  }
}

TEST_CASE("hat target keeps mode heights") {
  const auto base = bimodal_base();
  const auto r = snapshot_of({mode1d(-6, 1, base->log_density(vec({-6}))), mode1d(6, 4, base->log_density(vec({6})))}, 1);
  for (double beta : {1.0, 4.0, 64.0, 4096.0}) {
    const HatTarget hat(base, r, beta);
    for (std::size_t j = 0; j < r->size(); ++j) CHECK(hat.log_density(r->mode(j).mu) == r->mode(j).log_pi_at_mode);
  }
}

TEST_CASE("hat target same-allocation branch by hand") {
  const auto base = std::make_shared<GaussianTarget>(vec({0}), Matrix::Constant(1, 1, 1.0));
  const auto r = snapshot_of({mode1d(0, 1, std_normal_log_pdf(0))}, 1);
  const HatTarget hat(base, r, 4.0);
  CHECK(hat.log_density(vec({1.0})) == doctest::Approx(-2.0 - 0.5 * kLog2Pi).epsilon(1e-14));
}

TEST_CASE("hat target on an exact Gaussian is a rescaled Gaussian") {
  Stream rng(2, purpose::kTest, 11);
  const Eigen::Index d = 4;
  const Matrix s = random_spd(d, rng);
  const Vector mu = random_vector(d, rng);
  const auto base = std::make_shared<GaussianTarget>(mu, s);
  const auto r = snapshot_of({ModeInfo::from_covariance(mu, s, base->log_density(mu))}, d);
  const auto& m = r->mode(0);
  for (double beta : {2.0, 37.5}) {
    const HatTarget hat(base, r, beta);
    double lo = INFINITY, hi = -INFINITY;
    for (int i = 0; i < 100; ++i) {
      const Vector x = mu + random_vector(d, rng, 1.0 / std::sqrt(beta));
      const double diff = hat.log_density(x) - gaussian_log_pdf(x, mu, m.sigma_chol, m.log_det_sigma, beta);
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
    CHECK(hi - lo < 1e-10);
  }
}

TEST_CASE("hat target fallback branch") {
  // Allocation flips with temperature when the broad mode dominates at beta = 1
  // but the narrow one wins once both are tempered.
  const auto base = bimodal_base();
  const auto r = snapshot_of({mode1d(-6, 1, base->log_density(vec({-6}))), mode1d(6, 4, base->log_density(vec({6})))}, 1);
  const double beta = 9.0;
  const HatTarget hat(base, r, beta);
  int fallback = 0;
  for (double x = -20; x <= 20; x += 0.01) {
    const Vector v = vec({x});
    const auto a = allocate_pair(v, beta, *r);
    if (a.at_beta == a.at_one) {
      const double lpm = r->mode(a.at_beta).log_pi_at_mode;
      CHECK(hat.log_density(v) == doctest::Approx(lpm + beta * (base->log_density(v) - lpm)));
      continue;
    }
    ++fallback;
    const auto& m = r->mode(a.at_beta);
    const double ref = m.log_pi_at_mode + 0.5 * kLog2Pi + 0.5 * m.log_det_sigma +
                       gaussian_log_pdf(v, m.mu, m.sigma_chol, m.log_det_sigma, beta) - 0.5 * std::log(beta);
    CHECK(hat.log_density(v) == doctest::Approx(ref).epsilon(1e-12));
  }
  CHECK(fallback > 0);
}

TEST_CASE("truncated hat target") {
  const auto base = std::make_shared<GaussianTarget>(vec({0}), Matrix::Constant(1, 1, 1.0));
  const auto r = snapshot_of({mode1d(0, 1, std_normal_log_pdf(0))}, 1);
  const HatTarget inner(base, r, 3.0);
  const TruncatedHatTarget t4(inner, 4.0);
  CHECK(t4.log_density(vec({0})) == inner.log_density(vec({0})));
  CHECK(t4.log_density(vec({3})) == -std::numeric_limits<double>::infinity());
  CHECK(t4.log_density(vec({1.9})) == inner.log_density(vec({1.9})));
  const TruncatedHatTarget wide(inner, 1e12);
  Stream rng(3, purpose::kTest, 12);
  for (int i = 0; i < 500; ++i) {
    const Vector x = random_vector(1, rng, 5.0);
    CHECK(wide.log_density(x) == inner.log_density(x));
    CHECK(t4.log_density(x) <= inner.log_density(x));
  }
  CHECK_THROWS_AS(TruncatedHatTarget(inner, 0.0), ConfigError);
  CHECK(truncation_level(0.9999, 20) == doctest::Approx(chi_squared_quantile(0.9999, 20)));
}

TEST_CASE("power target") {
  const auto base = std::make_shared<GaussianTarget>(vec({1}), Matrix::Constant(1, 1, 2.0));
  const PowerTarget p(base, 0.25);
  CHECK(p.log_density(vec({3})) == 0.25 * base->log_density(vec({3})));
  CHECK(p.registry() == nullptr);
  CHECK_THROWS_AS(PowerTarget(base, 0.0), ConfigError);
}

TEST_CASE("ctrmd weights") {
  const Eigen::Index d = 3;
  const double sigma2 = 4.0;
  const CtrmdSpec spec({{0.5, Vector::Constant(d, -10), sigma2 * Matrix::Identity(d, d)},
                        {0.5, Vector::Constant(d, 10), Matrix::Identity(d, d)}},
                       ComponentShape{});
  const auto wp = spec.tempered_weights(2.0, CtrmdSpec::Tempering::weight_preserving);
  CHECK(wp[0] == doctest::Approx(0.5));
  const auto pw = spec.tempered_weights(2.0, CtrmdSpec::Tempering::power);
  // |Sigma_1|^{(1-beta)/2} = sigma^{-d} relative to the identity component.
  CHECK(pw[0] / pw[1] == doctest::Approx(std::pow(sigma2, -0.5 * d)));

  // At beta = 1 both rules give the untempered mixture sum_j a_j.
  Stream rng(4, purpose::kTest, 13);
  for (int i = 0; i < 20; ++i) {
    const Vector x = random_vector(d, rng, 12.0);
    const double crmd = logsumexp(std::vector<double>{spec.log_component(0, x), spec.log_component(1, x)});
    CHECK(spec.log_density(x, 1.0, CtrmdSpec::Tempering::power) == doctest::Approx(crmd).epsilon(1e-12));
    CHECK(spec.log_density(x, 1.0, CtrmdSpec::Tempering::weight_preserving) == doctest::Approx(crmd).epsilon(1e-12));
  }
}

TEST_CASE("ctrmd masses by quadrature") {
  for (const auto& shape : {ComponentShape{}, ComponentShape{ComponentShape::Kind::student_t, 5.0, {}}}) {
    const CtrmdSpec spec({{0.3, vec({-10}), Matrix::Constant(1, 1, 1.0)}, {0.7, vec({10}), Matrix::Constant(1, 1, 4.0)}},
                         shape);
    for (double beta : {1.0, 4.0, 16.0}) {
      for (auto mode : {CtrmdSpec::Tempering::weight_preserving, CtrmdSpec::Tempering::power}) {
        const auto w = spec.tempered_weights(beta, mode);
        auto dens = [&](double x) { return std::exp(spec.log_density(vec({x}), beta, mode)); };
        if (shape.kind == ComponentShape::Kind::gaussian) {
          CHECK(std::abs(integrate(dens, -200, 0) - w[0]) < 1e-6);
          CHECK(std::abs(integrate(dens, 0, 200) - w[1]) < 1e-6);
        }
        // First-principles tempered components carry the same masses.
        const double m0 = integrate([&](double x) { return std::exp(spec.log_tempered_component(0, vec({x}), beta, mode)); }, -200, 200);
        const double m1 = integrate([&](double x) { return std::exp(spec.log_tempered_component(1, vec({x}), beta, mode)); }, -200, 200);
        CHECK(m0 / (m0 + m1) == doctest::Approx(w[0]).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("component shape normalisers") {
  for (double beta : {0.5, 1.0, 3.0}) {
    const ComponentShape g{};
    CHECK(std::exp(g.log_tempered_integral(beta, 1)) ==
          doctest::Approx(integrate([&](double s) { return std::exp(beta * g.log_g(vec({s}))); }, -60, 60)).epsilon(1e-10));
    const ComponentShape t{ComponentShape::Kind::student_t, 3.0, {}};
    auto f = [&](double s) { return std::exp(beta * t.log_g(vec({s}))); };
    const double num = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 25, 1e-12);
    CHECK(std::exp(t.log_tempered_integral(beta, 1)) == doctest::Approx(num).epsilon(1e-7));
  }
  ComponentShape custom{ComponentShape::Kind::custom, 0.0, [](const Vector& s) { return -s.squaredNorm(); }};
  CHECK_THROWS_AS(custom.log_tempered_integral(2.0, 1), ConfigError);
}
