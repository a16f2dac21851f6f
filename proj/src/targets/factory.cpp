#include "alps/targets/factory.hpp"

#include "alps/error.hpp"
#include "alps/targets/gaussian.hpp"
#include "alps/targets/skew_normal.hpp"
#include "alps/targets/sur.hpp"

#include <set>

namespace alps {

namespace {

using nlohmann::json;

void check_keys(const json& spec, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : spec.items()) {
    if (key != "name" && !allowed.count(key)) {
      throw ConfigError("target." + key + ": unknown key for target '" +
                        spec.at("name").get<std::string>() + "'");
    }
  }
}

Vector to_vector(const json& j, const std::string& what) {
  try {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  } catch (const json::exception&) {
    throw ConfigError(what + ": expected a list of numbers");
  }
}

Matrix to_matrix(const json& j, Eigen::Index d, const std::string& what) {
  try {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    if (static_cast<Eigen::Index>(rows.size()) != d) throw ConfigError(what + ": expected " + std::to_string(d) + " rows");
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != d) throw ConfigError(what + ": ragged matrix");
      for (Eigen::Index k = 0; k < d; ++k) m(i, k) = rows[i][k];
    }
    return m;
  } catch (const json::exception&) {
    throw ConfigError(what + ": expected a list of rows");
  }
}

template <class T>
T get_or(const json& spec, const std::string& key, T fallback) {
  if (!spec.contains(key) || spec.at(key).is_null()) return fallback;
  try {
    return spec.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("target." + key + ": wrong type");
  }
}

int nearest_gaussian(const GaussianMixtureTarget& t, const Vector& x) {
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < t.size(); ++j) {
    const GaussianTarget g(t.component(j).mu, t.component(j).sigma);
    const double v = std::log(t.component(j).weight) + g.log_density(x);
    if (v > best_val) {
      best_val = v;
      best = static_cast<int>(j);
    }
  }
  return best;
}

SurCsvOptions sur_options(const json& spec) {
  SurCsvOptions o;
  if (spec.contains("first_year") && !spec["first_year"].is_null()) o.first_year = get_or<int>(spec, "first_year", 0);
  if (spec.contains("last_year") && !spec["last_year"].is_null()) o.last_year = get_or<int>(spec, "last_year", 0);
  o.firms = get_or<std::vector<std::string>>(spec, "firms", {});
  return o;
}

}  // namespace

TargetBundle make_target(const json& spec) {
  if (!spec.is_object() || !spec.contains("name") || !spec["name"].is_string()) {
    throw ConfigError("target: expected an object with a name");
  }
  const std::string name = spec["name"].get<std::string>();
  TargetBundle b;

  if (name == "gaussian") {
    check_keys(spec, {"dim", "mean", "cov"});
    Vector mu;
    if (spec.contains("mean")) {
      mu = to_vector(spec["mean"], "target.mean");
    } else {
      mu = Vector::Zero(get_or<int>(spec, "dim", 1));
    }
    if (spec.contains("dim") && get_or<int>(spec, "dim", 1) != mu.size()) {
      throw ConfigError("target.dim disagrees with target.mean");
    }
    Matrix cov = spec.contains("cov") ? to_matrix(spec["cov"], mu.size(), "target.cov")
                                      : Matrix::Identity(mu.size(), mu.size());
    b.target = std::make_shared<GaussianTarget>(mu, cov);
    b.labeler = [](const Vector&) { return 0; };
    return b;
  }
  if (name == "gaussian_mixture") {
    check_keys(spec, {"components"});
    if (!spec.contains("components") || !spec["components"].is_array()) {
      throw ConfigError("target.components: expected a list");
    }
    std::vector<GaussianComponent> comps;
    for (const auto& c : spec["components"]) {
      GaussianComponent g;
      g.weight = get_or<double>(c, "weight", 1.0);
      g.mu = to_vector(c.at("mean"), "target.components.mean");
      g.sigma = c.contains("cov") ? to_matrix(c["cov"], g.mu.size(), "target.components.cov")
                                  : Matrix::Identity(g.mu.size(), g.mu.size());
      comps.push_back(std::move(g));
    }
    auto t = std::make_shared<GaussianMixtureTarget>(std::move(comps));
    b.target = t;
    b.labeler = [t](const Vector& x) { return nearest_gaussian(*t, x); };
    return b;
  }
  if (name == "four_mode_skew" || name == "skew_normal_mixture") {
    std::shared_ptr<SkewNormalMixtureTarget> t;
    if (name == "four_mode_skew") {
      check_keys(spec, {"dim", "alpha"});
      t = std::make_shared<SkewNormalMixtureTarget>(
          make_four_mode_benchmark(get_or<int>(spec, "dim", 20), get_or<double>(spec, "alpha", 10.0)));
    } else {
      check_keys(spec, {"alpha", "locations", "scales"});
      std::vector<Vector> locs;
      for (const auto& l : spec.at("locations")) locs.push_back(to_vector(l, "target.locations"));
      t = std::make_shared<SkewNormalMixtureTarget>(
          get_or<double>(spec, "alpha", 0.0), std::move(locs),
          get_or<std::vector<double>>(spec, "scales", {}));
    }
    b.target = t;
    b.labeler = [t](const Vector& x) { return static_cast<int>(t->nearest_component(x)); };
    return b;
  }
  if (name == "sur") {
    check_keys(spec, {"csv", "first_year", "last_year", "firms"});
    if (!spec.contains("csv") || !spec["csv"].is_string()) {
      throw ConfigError("target.csv: path to a firm,year,invest,value,capital panel is required");
    }
    b.target = std::make_shared<SurProfileTarget>(load_sur_csv(spec["csv"].get<std::string>(), sur_options(spec)));
    return b;
  }
  if (name == "sur_grunfeld") {
    check_keys(spec, {"csv"});
    const auto path = spec.contains("csv") ? std::filesystem::path(spec["csv"].get<std::string>())
                                           : default_data_dir() / "grunfeld.csv";
    b.target = std::make_shared<SurProfileTarget>(grunfeld_five_firms(path));
    return b;
  }
  throw ConfigError("target: unknown name '" + name + "'");
}

}  // namespace alps
