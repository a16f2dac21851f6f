#include "alps/error.hpp"
#include "alps/exploration.hpp"
#include "alps/targets/sur.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace alps;
using namespace alps::test;

namespace {

std::filesystem::path write_fixture(const std::string& name, const std::string& body) {
  const auto dir = std::filesystem::temp_directory_path() / "alps_sur_tests";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p) << body;
  return p;
}

std::string error_of(const std::filesystem::path& p) {
  try {
    load_sur_csv(p);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

// Per-equation least squares by Householder QR.
Vector qr_ols(const SurData& d) {
  Vector out(d.dim());
  for (Eigen::Index m = 0; m < d.equations(); ++m) {
    out.segment(m * d.covariates(), d.covariates()) = d.x[m].householderQr().solve(d.y[m]);
  }
  return out;
}

// GLS with the full MN x MN weight matrix (Sigma kron I_N)^{-1}.
Vector dense_gls(const Matrix& sigma, const SurData& d) {
  const Eigen::Index m = d.equations(), n = d.observations(), j = d.covariates();
  Matrix x = Matrix::Zero(m * n, m * j);
  Vector y(m * n);
  for (Eigen::Index e = 0; e < m; ++e) {
    x.block(e * n, e * j, n, j) = d.x[e];
    y.segment(e * n, n) = d.y[e];
  }
  Matrix omega = Matrix::Zero(m * n, m * n);
  const Matrix si = sigma.inverse();
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) omega.block(a * n, b * n, n, n) = si(a, b) * Matrix::Identity(n, n);
  const Matrix xtw = x.transpose() * omega;
  return (xtw * x).ldlt().solve(xtw * y);
}

SurData synthetic(int m, int n, const Vector& theta, double noise, std::uint32_t salt) {
  Stream rng(5, purpose::kTest, salt);
  SurData d;
  for (int e = 0; e < m; ++e) {
    d.labels.push_back("f" + std::to_string(e));
    Matrix x(n, 3);
    for (int i = 0; i < n; ++i) x.row(i) << 1.0, 10 * rng.uniform(), 5 * rng.normal();
    Vector y = x * theta.segment(3 * e, 3);
    for (int i = 0; i < n; ++i) y[i] += noise * rng.normal();
    d.x.push_back(x);
    d.y.push_back(y);
  }
  for (int i = 0; i < n; ++i) d.periods.push_back(2000 + i);
  return d;
}

}  // namespace

TEST_CASE("csv loading") {
  const auto p = write_fixture("mini.csv",
                               "firm,year,invest,value,capital\n"
                               "A,1,1.0,10,5\nA,2,2.0,11,6\nA,3,3.5,12,7\n"
                               "B,1,0.5,20,1\nB,2,0.7,21,2\nB,3,0.9,23,2\n");
  const SurData d = load_sur_csv(p);
  CHECK(d.equations() == 2);
  CHECK(d.observations() == 3);
  CHECK(d.covariates() == 3);
  CHECK(d.dim() == 6);
  CHECK(d.labels == std::vector<std::string>{"A", "B"});
  CHECK(d.x[1](2, 0) == 1.0);
  CHECK(d.x[1](2, 1) == 23.0);
  CHECK(d.x[1](2, 2) == 2.0);
  CHECK(d.y[0][2] == 3.5);

  CHECK(error_of(write_fixture("dup.csv", "firm,year,invest,value,capital\nA,1,1,1,1\nA,1,2,2,2\n")).find("duplicate") !=
        std::string::npos);
  CHECK(error_of(write_fixture("col.csv", "firm,year,invest,value\nA,1,1,1\n")).find("capital") != std::string::npos);
  CHECK(error_of(write_fixture("nan.csv", "firm,year,invest,value,capital\nA,1,1,1,1\nA,2,x,1,1\n")).find("row 3") !=
        std::string::npos);
  CHECK_FALSE(error_of(write_fixture("rag.csv", "firm,year,invest,value,capital\nA,1,1,1,1\nA,2,1,1,1\nB,1,1,1,1\n")).empty());
  CHECK_FALSE(error_of("/nonexistent/grunfeld.csv").empty());

  SurCsvOptions crc;
  crc.expected_crc32 = 0x12345678u;
  CHECK_THROWS_AS(load_sur_csv(p, crc), ConfigError);
}

TEST_CASE("bundled Grunfeld panel") {
  const auto path = default_data_dir() / "grunfeld.csv";
  CHECK(file_crc32(path) == kGrunfeldCrc32);
  const SurData d = grunfeld_five_firms(path);
  CHECK(d.equations() == 5);
  CHECK(d.observations() == 15);
  CHECK(d.covariates() == 3);
  CHECK(d.dim() == 15);
  CHECK(d.periods.front() == 1935);
  CHECK(d.periods.back() == 1949);
}

TEST_CASE("residual covariance") {
  const Vector theta = vec({1, 2, -1, 0.5, 0.1, 3});
  const SurData clean = synthetic(2, 12, theta, 0.0, 1);
  CHECK(sur_sigma_hat(theta, clean).cwiseAbs().maxCoeff() < 1e-20 + 1e-12);

  const SurData one = synthetic(1, 20, theta.head(3), 1.0, 2);
  const Vector b = vec({0.9, 2.1, -1.1});
  const double ssr = (one.y[0] - one.x[0] * b).squaredNorm();
  CHECK(sur_sigma_hat(b, one)(0, 0) == doctest::Approx(ssr / 20));

  const SurData g = grunfeld_five_firms();
  const Vector ols = qr_ols(g);
  CHECK((sur_ols(g) - ols).norm() / ols.norm() < 1e-10);
  const Matrix s = sur_sigma_hat(ols, g);
  CHECK((s - s.transpose()).norm() == 0.0);
  for (Eigen::Index m = 0; m < 5; ++m) {
    const Vector r = g.y[m] - g.x[m] * ols.segment(3 * m, 3);
    CHECK(s(m, m) == doctest::Approx(r.squaredNorm() / 15).epsilon(1e-8));
  }
}

TEST_CASE("generalised least squares") {
  const SurData g = grunfeld_five_firms();
  CHECK((sur_gls_theta(Matrix::Identity(5, 5), g) - qr_ols(g)).norm() / qr_ols(g).norm() < 1e-10);
  const SurData one = synthetic(1, 20, vec({1, 2, 3}), 1.0, 3);
  CHECK((sur_gls_theta(Matrix::Constant(1, 1, 17.0), one) - qr_ols(one)).norm() < 1e-10);

  const Matrix s = sur_sigma_hat(qr_ols(g), g);
  const Vector dense = dense_gls(s, g);
  const Vector fast = sur_gls_theta(s, g);
  for (Eigen::Index i = 0; i < dense.size(); ++i) CHECK(fast[i] == doctest::Approx(dense[i]).epsilon(1e-6));

  SurData flat = one;
  flat.x[0].col(2) = flat.x[0].col(1);
  CHECK_THROWS_AS(sur_gls_theta(Matrix::Identity(1, 1), flat), NumericalError);
}

TEST_CASE("iterated Zellner fit") {
  const Vector theta = vec({1, 2, -1, 0.5, 0.1, 3, -2, 0, 1});
  const SurData clean = synthetic(3, 10, theta, 0.0, 4);
  const auto c = zellner_iterate(clean, {1e-8, 100, ConvergenceRule::max_abs});
  CHECK(c.iterations <= 2);
  CHECK((c.theta - theta).norm() < 1e-8);

  const auto one = zellner_iterate(synthetic(1, 30, theta.head(3), 1.0, 5));
  CHECK(one.converged);
  CHECK(one.iterations == 1);

  const SurData g = grunfeld_five_firms();
  const auto fit = zellner_iterate(g);
  CHECK(fit.converged);
  CHECK(fit.loglik.back() == doctest::Approx(-263.7).epsilon(0.1 / 263.7));
  CHECK(fit.iterations == 97);
  const auto rel = zellner_iterate(g, {1e-5, 1000, ConvergenceRule::relative_l2});
  CHECK(rel.iterations == 53);
  CHECK(rel.loglik.back() == doctest::Approx(-263.7295).epsilon(1e-6));

  const auto capped = zellner_iterate(g, {1e-12, 5, ConvergenceRule::max_abs});
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 5);

  int drops = 0;
  for (std::size_t i = 2; i < fit.loglik.size(); ++i) drops += fit.loglik[i] < fit.loglik[i - 1] - 1e-9;
  MESSAGE("log-likelihood decreases along the Grunfeld path: " << drops);
}

TEST_CASE("profile log-likelihood") {
  const SurData g = grunfeld_five_firms();
  const Vector ols = qr_ols(g);
  const double n = 15;
  const Matrix s = sur_sigma_hat(ols, g);
  CHECK(sur_profile_loglik(ols, g) ==
        doctest::Approx(-n * std::log(2 * std::numbers::pi) - 0.5 * n * std::log(s.determinant()) - n));

  // Scaling all residuals by c lowers the value by N M log c.
  const double c = 3.0;
  SurData scaled = g;
  for (Eigen::Index m = 0; m < 5; ++m) {
    const Vector fitted = g.x[m] * ols.segment(3 * m, 3);
    scaled.y[m] = fitted + c * (g.y[m] - fitted);
  }
  CHECK(sur_profile_loglik(ols, g) - sur_profile_loglik(ols, scaled) == doctest::Approx(n * 5 * std::log(c)));

  // Invariance under relabelling the firms.
  SurData perm = g;
  const std::vector<int> order{3, 0, 4, 1, 2};
  Vector tp(15);
  for (int m = 0; m < 5; ++m) {
    perm.labels[m] = g.labels[order[m]];
    perm.y[m] = g.y[order[m]];
    perm.x[m] = g.x[order[m]];
    tp.segment(3 * m, 3) = ols.segment(3 * order[m], 3);
  }
  CHECK(sur_profile_loglik(tp, perm) == doctest::Approx(sur_profile_loglik(ols, g)).epsilon(1e-13));

  // Identical equations give a singular residual covariance.
  SurData twin = synthetic(1, 10, vec({1, 2, 3}), 1.0, 6);
  twin.labels.push_back("copy");
  twin.x.push_back(twin.x[0]);
  twin.y.push_back(twin.y[0]);
  CHECK(sur_profile_loglik(vec({1, 2, 3, 1, 2, 3}), twin) == -INFINITY);
}

TEST_CASE("profile target derivatives") {
  const SurProfileTarget t(grunfeld_five_firms());
  const Vector base = zellner_iterate(t.data()).theta;
  Stream rng(6, purpose::kTest, 60);
  for (int i = 0; i < 5; ++i) {
    Vector x = base;
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] *= 1 + 0.05 * rng.normal();
    const Vector g = t.gradient(x);
    const Vector fd = finite_difference_gradient(t, x, 1e-7);
    CHECK((g - fd).norm() / g.norm() < 1e-5);
    const Matrix h = t.hessian(x);
    Matrix hfd(15, 15);
    for (Eigen::Index k = 0; k < 15; ++k) {
      const double step = 1e-6 * std::max(1.0, std::abs(x[k]));
      Vector xp = x, xm = x;
      xp[k] += step;
      xm[k] -= step;
      hfd.col(k) = (t.gradient(xp) - t.gradient(xm)) / (2 * step);
    }
    CHECK((h - hfd).norm() / h.norm() < 1e-5);
    CHECK((h - h.transpose()).norm() < 1e-10 * h.norm());
  }
  // The Zellner fixed point is a stationary point of the profile likelihood.
  const Vector g0 = t.gradient(base);
  CHECK(g0.cwiseAbs().maxCoeff() < 1e-3);
  const auto opt = local_optimize(t, base);
  CHECK(opt.converged);
  CHECK(opt.log_density == doctest::Approx(-263.7295).epsilon(1e-6));
}
