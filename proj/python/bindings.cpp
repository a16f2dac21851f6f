#include "alps/config.hpp"
#include "alps/error.hpp"
#include "alps/hat_target.hpp"
#include "alps/outputs.hpp"
#include "alps/sampler.hpp"
#include "alps/scaling.hpp"
#include "alps/targets/factory.hpp"
#include "alps/targets/sur.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using nlohmann::json;

namespace {

json parse(const std::string& s) {
  try {
    return json::parse(s);
  } catch (const json::parse_error& e) {
    throw alps::ConfigError(e.what());
  }
}

py::array_t<double> to_array(const std::vector<alps::Vector>& rows, Eigen::Index dim) {
  py::array_t<double> out({static_cast<py::ssize_t>(rows.size()), static_cast<py::ssize_t>(dim)});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = rows[i][j];
  return out;
}

alps::Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const alps::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

py::dict run(const std::string& algorithm, const std::string& config_json, const std::string& out_dir) {
  const alps::RunConfig cfg = alps::parse_run_config(parse(config_json));
  const auto bundle = alps::make_target(cfg.target);
  alps::RunResult res;
  {
    py::gil_scoped_release release;
    if (algorithm == "alps") res = alps::alps_run(cfg, bundle);
    else if (algorithm == "pt") res = alps::pt_run(cfg, bundle);
    else if (algorithm == "lais") res = alps::lais_run(cfg, bundle);
    else throw alps::ConfigError("unknown algorithm '" + algorithm + "'");
    if (!out_dir.empty()) alps::emit_outputs(res, cfg, out_dir);
  }
  py::dict d;
  d["samples"] = to_array(res.samples(), res.diagnostics.dim);
  d["trace_sweeps"] = res.diagnostics.trace_sweeps;
  d["tracked"] = res.diagnostics.tracked;
  d["visits_target"] = res.diagnostics.visits_target;
  d["acceptance"] = alps::acceptance_json(res.diagnostics).dump();
  d["summary"] = alps::summary_json(res, cfg).dump();
  d["timing"] = alps::timing_json(res.diagnostics).dump();
  d["modes"] = res.registry ? res.registry->to_json().dump() : std::string("null");
  return d;
}

}  // namespace

PYBIND11_MODULE(_alps, m) {
  m.doc() = "Annealed leap-point sampler core";

  py::register_exception<alps::ConfigError>(m, "ConfigError", PyExc_ValueError);
  auto numerical = py::register_exception<alps::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<alps::NoModesError>(m, "NoModesError", numerical.ptr());

  m.def("run", &run, py::arg("algorithm"), py::arg("config_json"), py::arg("out_dir") = "");
  m.def("resolve_config", [](const std::string& c) { return alps::run_config_to_json(alps::parse_run_config(parse(c))).dump(); });
  m.def("preset_names", &alps::preset_names);

  m.def("log_density", [](const std::string& target_json, const std::vector<double>& x) {
    return alps::make_target(parse(target_json)).target->log_density(to_vector(x));
  });
  m.def("hat_log_density", [](const std::string& target_json, const std::string& modes_json, double beta,
                              const std::vector<double>& x) {
    const auto bundle = alps::make_target(parse(target_json));
    auto reg = std::make_shared<const alps::ModeRegistry>(alps::ModeRegistry::from_json(parse(modes_json)));
    return alps::HatTarget(bundle.target, reg, beta).log_density(to_vector(x));
  });

  m.def("running_prob_estimate", [](const std::vector<double>& trace, double threshold, std::size_t burn_in, bool printed) {
    return alps::running_prob_estimate(trace, threshold, burn_in, printed);
  }, py::arg("trace"), py::arg("threshold"), py::arg("burn_in"), py::arg("printed_normaliser") = false);

  m.def("predicted_acceptance", &alps::predicted_acceptance, py::arg("h3"), py::arg("h2"), py::arg("ell"));
  m.def("scaling_experiment", [](const std::string& shape, double alpha, double ell, std::vector<int> dims,
                                 std::uint64_t samples, std::uint64_t seed) {
    alps::ScalingExperimentConfig c{shape, alpha, ell, std::move(dims), samples, seed};
    std::vector<alps::ScalingRow> rows;
    {
      py::gil_scoped_release release;
      rows = alps::scaling_experiment(c);
    }
    py::list out;
    for (const auto& r : rows) {
      py::dict d;
      d["d"] = r.d;
      d["beta"] = r.beta;
      d["observed_rate"] = r.observed_rate;
      d["mc_stderr"] = r.mc_stderr;
      d["predicted_rate"] = r.predicted_rate;
      out.append(d);
    }
    return out;
  }, py::arg("shape") = "skew_normal", py::arg("alpha") = 3.0, py::arg("ell") = 1.0,
     py::arg("dims") = std::vector<int>{10, 20, 40, 80}, py::arg("samples") = 100000, py::arg("seed") = 1);

  m.def("zellner_fit", [](const std::string& csv, double tol, int max_iter, const std::string& rule) {
    const alps::SurData data = csv.empty() ? alps::grunfeld_five_firms() : alps::grunfeld_five_firms(csv);
    alps::ZellnerOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    if (rule == "max_abs") o.rule = alps::ConvergenceRule::max_abs;
    else if (rule == "relative_l2") o.rule = alps::ConvergenceRule::relative_l2;
    else throw alps::ConfigError("unknown rule '" + rule + "' (max_abs, relative_l2)");
    return alps::zellner_json(alps::zellner_iterate(data, o), data).dump();
  }, py::arg("csv") = "", py::arg("tol") = 1e-6, py::arg("max_iter") = 1000, py::arg("rule") = "max_abs");
}
