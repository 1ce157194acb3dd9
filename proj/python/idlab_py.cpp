#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "idlab/errors.hpp"
#include "idlab/experiments.hpp"
#include "idlab/linear.hpp"
#include "idlab/numerics.hpp"
#include "idlab/tasks.hpp"
#include "idlab/transport.hpp"

namespace py = pybind11;
using namespace idlab;

namespace {

std::string run_json(const std::string& config_json, std::size_t jobs) {
  const ExperimentConfig cfg = parse_config(Json::parse(config_json));
  return run_experiment(cfg, jobs).results.dump();
}

std::string list_json() {
  Json arr = Json::array();
  for (const auto& e : experiment_registry())
    arr.push_back({{"name", e.name}, {"anchor", e.anchor}, {"default_runtime_s", e.default_runtime_s},
                   {"default_params", e.default_params}, {"csv_columns", e.csv_columns}});
  return arr.dump();
}

TriangularMap gaussian_kr(const VectorXd& ms, const MatrixXd& cs, const VectorXd& mt, const MatrixXd& ct,
                          bool cdf_chain) {
  auto s = std::make_shared<GaussianDistribution>(ms, cs);
  auto t = std::make_shared<GaussianDistribution>(mt, ct);
  return kr_transport(s, t, kKrTol, cdf_chain ? KrRoute::CdfChain : KrRoute::Auto);
}

}  // namespace

PYBIND11_MODULE(_idlab, m) {
  m.doc() = "idlab core bindings";
  // translators run newest first, so the subclass goes last
  py::register_exception<Error>(m, "IdlabError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("_run_json", &run_json, py::arg("config_json"), py::arg("jobs") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("_list_json", &list_json);
  m.def("_schema_json", [] { return config_schema().dump(2); });

  py::class_<TriangularMap>(m, "TriangularMap")
      .def_property_readonly("dim", &TriangularMap::dim)
      .def_property_readonly("kind", &TriangularMap::kind_name)
      .def("forward", &TriangularMap::forward)
      .def("inverse", &TriangularMap::inverse)
      .def("forward_rows", &TriangularMap::forward_rows)
      .def("inverse_rows", &TriangularMap::inverse_rows)
      .def("to_json", [](const TriangularMap& t) { return t.to_json().dump(); });
  m.def("gaussian_kr", &gaussian_kr, py::arg("mean_source"), py::arg("cov_source"), py::arg("mean_target"),
        py::arg("cov_target"), py::arg("cdf_chain") = false);
  m.def("explicit_map", &explicit_map_by_name, py::arg("name"), py::arg("dim"));

  m.def(
      "rotation_counterexample",
      [](const VectorXd& mu1, const VectorXd& mu2, const MatrixXd& f1, const VectorXd& alpha1) {
        const Counterexample ce = rotation_counterexample(mu1, mu2, LinearGenerator(f1, alpha1));
        py::dict d;
        d["loading"] = ce.f2.loading();
        d["offset"] = ce.f2.offset();
        d["rotation"] = ce.rotation;
        d["mean_residual_1"] = ce.mean_residual_1;
        d["mean_residual_2"] = ce.mean_residual_2;
        d["covariance_residual"] = ce.covariance_residual;
        d["loading_distance"] = ce.loading_distance;
        return d;
      },
      py::arg("mu1"), py::arg("mu2"), py::arg("f1"), py::arg("alpha1"));
  m.def("spearman_rho", &spearman_rho);
  m.def("ks_pvalue", &num::ks_pvalue, py::arg("d"), py::arg("n"));
  m.def("ks_critical_value", &num::ks_critical_value, py::arg("n"), py::arg("alpha"));
}
