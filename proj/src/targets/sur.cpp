#include "alps/targets/sur.hpp"

#include "alps/error.hpp"

#include <boost/crc.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#ifndef ALPS_DATA_DIR
#define ALPS_DATA_DIR "data"
#endif

namespace alps {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError("row " + std::to_string(row) + ": column '" + column +
                      "' is not a number: '" + cell + "'");
  }
  return v;
}

struct Record {
  double invest, value, capital;
};

}  // namespace

void SurData::validate() const {
  if (y.empty()) throw ConfigError("SUR: no equations");
  if (x.size() != y.size() || labels.size() != y.size()) {
    throw ConfigError("SUR: one design matrix and label per equation required");
  }
  const Eigen::Index n = observations();
  const Eigen::Index j = covariates();
  if (n == 0 || j == 0) throw ConfigError("SUR: empty equations");
  for (std::size_t m = 0; m < y.size(); ++m) {
    if (y[m].size() != n || x[m].rows() != n || x[m].cols() != j) {
      throw ConfigError("SUR: equation '" + labels[m] + "' has inconsistent block shape");
    }
  }
}

std::uint32_t file_crc32(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

SurData load_sur_csv(const std::filesystem::path& path, const SurCsvOptions& options) {
  if (options.expected_crc32) {
    const auto crc = file_crc32(path);
    if (crc != *options.expected_crc32) {
      std::ostringstream msg;
      msg << path.string() << ": checksum mismatch (crc32 " << std::hex << crc << ", expected "
          << *options.expected_crc32 << ")";
      throw ConfigError(msg.str());
    }
  }
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty file");
  const auto header = split_row(line);
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ConfigError(path.string() + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_firm = column("firm");
  const std::size_t c_year = column("year");
  const std::size_t c_inv = column("invest");
  const std::size_t c_val = column("value");
  const std::size_t c_cap = column("capital");

  std::vector<std::string> order;
  std::map<std::string, std::map<int, Record>> panel;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw ConfigError("row " + std::to_string(row) + ": expected " +
                        std::to_string(header.size()) + " cells, found " +
                        std::to_string(cells.size()));
    }
    const std::string& firm = cells[c_firm];
    if (firm.empty()) throw ConfigError("row " + std::to_string(row) + ": empty firm");
    const double year_value = parse_number(cells[c_year], row, "year");
    if (year_value != std::floor(year_value)) {
      throw ConfigError("row " + std::to_string(row) + ": year is not an integer");
    }
    const int year = static_cast<int>(year_value);
    const Record rec{parse_number(cells[c_inv], row, "invest"),
                     parse_number(cells[c_val], row, "value"),
                     parse_number(cells[c_cap], row, "capital")};
    if (options.first_year && year < *options.first_year) continue;
    if (options.last_year && year > *options.last_year) continue;
    auto& series = panel[firm];
    if (series.empty() && std::find(order.begin(), order.end(), firm) == order.end()) {
      order.push_back(firm);
    }
    if (!series.emplace(year, rec).second) {
      throw ConfigError("row " + std::to_string(row) + ": duplicate observation for (" + firm +
                        ", " + std::to_string(year) + ")");
    }
  }

  const std::vector<std::string> firms = options.firms.empty() ? order : options.firms;
  if (firms.empty()) throw ConfigError(path.string() + ": no observations");

  SurData data;
  for (const auto& firm : firms) {
    const auto it = panel.find(firm);
    if (it == panel.end()) throw ConfigError(path.string() + ": no rows for firm '" + firm + "'");
    std::vector<int> years;
    for (const auto& [year, rec] : it->second) years.push_back(year);
    if (data.labels.empty()) {
      data.periods = years;
    } else if (years != data.periods) {
      throw ConfigError(path.string() + ": ragged panel, firm '" + firm +
                        "' does not cover the same years as '" + data.labels.front() + "'");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(years.size());
    Vector y(n);
    Matrix x(n, 3);
    Eigen::Index i = 0;
    for (const auto& [year, rec] : it->second) {
      y[i] = rec.invest;
      x.row(i) << 1.0, rec.value, rec.capital;
      ++i;
    }
    data.labels.push_back(firm);
    data.y.push_back(std::move(y));
    data.x.push_back(std::move(x));
  }
  data.validate();
  return data;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("ALPS_DATA_DIR"); env && *env) return env;
  return ALPS_DATA_DIR;
}

SurData grunfeld_five_firms(const std::filesystem::path& csv) {
  SurCsvOptions opts;
  opts.first_year = 1935;
  opts.last_year = 1949;
  opts.firms = {"General Motors", "Chrysler", "General Electric", "Westinghouse", "US Steel"};
  opts.expected_crc32 = kGrunfeldCrc32;
  return load_sur_csv(csv, opts);
}

Matrix sur_residuals(const Vector& theta, const SurData& data) {
  const Eigen::Index m_count = data.equations();
  const Eigen::Index j = data.covariates();
  if (theta.size() != data.dim()) throw ConfigError("SUR: theta has the wrong length");
  Matrix r(m_count, data.observations());
  for (Eigen::Index m = 0; m < m_count; ++m) {
    r.row(m) = (data.y[m] - data.x[m] * theta.segment(m * j, j)).transpose();
  }
  return r;
}

Matrix sur_sigma_hat(const Vector& theta, const SurData& data) {
  const Matrix r = sur_residuals(theta, data);
  return (r * r.transpose()) / static_cast<double>(data.observations());
}

Vector sur_ols(const SurData& data) {
  const Eigen::Index j = data.covariates();
  Vector theta(data.dim());
  for (Eigen::Index m = 0; m < data.equations(); ++m) {
    theta.segment(m * j, j) = data.x[m].colPivHouseholderQr().solve(data.y[m]);
  }
  return theta;
}

Vector sur_gls_theta(const Matrix& sigma, const SurData& data) {
  const Eigen::Index mc = data.equations();
  const Eigen::Index j = data.covariates();
  if (sigma.rows() != mc || sigma.cols() != mc) throw ConfigError("GLS: sigma must be M x M");
  const auto chol = cholesky(sigma);
  if (chol.failed_pivot) throw NumericalError("GLS: error covariance is not positive definite");
  const Matrix w = inverse_from_cholesky(chol.lower);

  Matrix a = Matrix::Zero(mc * j, mc * j);
  Vector b = Vector::Zero(mc * j);
  for (Eigen::Index l = 0; l < mc; ++l) {
    for (Eigen::Index m = 0; m < mc; ++m) {
      a.block(l * j, m * j, j, j) = w(l, m) * (data.x[l].transpose() * data.x[m]);
      b.segment(l * j, j) += w(l, m) * (data.x[l].transpose() * data.y[m]);
    }
  }
  const auto normal = cholesky(0.5 * (a + a.transpose()));
  if (normal.failed_pivot) throw NumericalError("unidentifiable system");
  const Vector z = normal.lower.triangularView<Eigen::Lower>().solve(b);
  return normal.lower.transpose().triangularView<Eigen::Upper>().solve(z);
}

ZellnerResult zellner_iterate(const SurData& data, const ZellnerOptions& options) {
  if (!(options.tol > 0.0) || options.max_iter <= 0) {
    throw ConfigError("zellner: tol and max_iter must be positive");
  }
  ZellnerResult out;
  Vector theta = sur_ols(data);
  out.path.push_back(theta);
  for (int it = 1; it <= options.max_iter; ++it) {
    Vector next = sur_gls_theta(sur_sigma_hat(theta, data), data);
    const Vector step = next - theta;
    const double change = options.rule == ConvergenceRule::max_abs
                              ? step.cwiseAbs().maxCoeff()
                              : step.norm() / theta.norm();
    theta = std::move(next);
    out.iterations = it;
    out.path.push_back(theta);
    out.loglik.push_back(sur_profile_loglik(theta, data));
    if (change < options.tol) {
      out.converged = true;
      break;
    }
  }
  out.theta = theta;
  out.sigma = sur_sigma_hat(theta, data);
  return out;
}

double sur_profile_loglik(const Vector& theta, const SurData& data) {
  const double n = static_cast<double>(data.observations());
  const auto chol = cholesky(sur_sigma_hat(theta, data));
  if (chol.failed_pivot) return -std::numeric_limits<double>::infinity();
  return -n * std::log(2.0 * std::numbers::pi) - 0.5 * n * log_det_from_cholesky(chol.lower) - n;
}

SurProfileTarget::SurProfileTarget(SurData data) : data_(std::move(data)) { data_.validate(); }

double SurProfileTarget::log_density(const Vector& theta) const {
  return sur_profile_loglik(theta, data_);
}

Vector SurProfileTarget::gradient(const Vector& theta) const {
  // d/dtheta_m = X_m^T (S^{-1} R)_m
  const Matrix r = sur_residuals(theta, data_);
  const Matrix s = (r * r.transpose()) / static_cast<double>(data_.observations());
  const auto chol = cholesky(s);
  if (chol.failed_pivot) throw NumericalError("SUR gradient: sigma_hat is not positive definite");
  const Matrix p = inverse_from_cholesky(chol.lower) * r;
  const Eigen::Index j = data_.covariates();
  Vector g(data_.dim());
  for (Eigen::Index m = 0; m < data_.equations(); ++m) {
    g.segment(m * j, j) = data_.x[m].transpose() * p.row(m).transpose();
  }
  return g;
}

Matrix SurProfileTarget::hessian(const Vector& theta) const {
  const double n = static_cast<double>(data_.observations());
  const Matrix r = sur_residuals(theta, data_);
  const auto chol = cholesky((r * r.transpose()) / n);
  if (chol.failed_pivot) throw NumericalError("SUR Hessian: sigma_hat is not positive definite");
  const Matrix s_inv = inverse_from_cholesky(chol.lower);
  const Matrix p = s_inv * r;
  const Eigen::Index mc = data_.equations();
  const Eigen::Index j = data_.covariates();
  Matrix h(data_.dim(), data_.dim());
  Matrix dr = Matrix::Zero(mc, data_.observations());
  for (Eigen::Index l = 0; l < mc; ++l) {
    for (Eigen::Index k = 0; k < j; ++k) {
      dr.setZero();
      dr.row(l) = -data_.x[l].col(k).transpose();
      const Matrix ds = (dr * r.transpose() + r * dr.transpose()) / n;
      const Matrix dp = s_inv * (dr - ds * p);
      for (Eigen::Index m = 0; m < mc; ++m) {
        h.block(m * j, l * j + k, j, 1) = data_.x[m].transpose() * dp.row(m).transpose();
      }
    }
  }
  return 0.5 * (h + h.transpose());
}

}  // namespace alps
