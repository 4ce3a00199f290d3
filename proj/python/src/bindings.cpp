#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "projflat/harness.hpp"

namespace py = pybind11;
using namespace projflat;

namespace {

// Configs and reports cross the boundary as JSON text; the Python side
// converts with the json module.
std::string run_suite_json(const std::string& config_json, const std::vector<std::string>& tol_overrides) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(config_json);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  SuiteConfig c = parse_config(j);
  for (const auto& t : tol_overrides) apply_tol_override(c, t);
  validate_config(c);
  return report_to_json(run_suite(c)).dump();
}

EtaField eta_field(const std::string& kind, double A, double omega) {
  EtaField e;
  e.kind = EtaField::kind_from_name(kind);
  e.A = A;
  e.omega = omega;
  return e;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Numerical checks for projectively flat (alpha, beta)-metrics";
  mod.attr("engine_version") = kEngineVersion;
  mod.attr("schema_version") = kSchemaVersion;

  auto base = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(mod, "DomainError", base.ptr());
  py::register_exception<SingularMatrixError>(mod, "SingularMatrixError", base.ptr());
  py::register_exception<InvalidParameter>(mod, "InvalidParameter", base.ptr());
  py::register_exception<ConvergenceError>(mod, "ConvergenceError", base.ptr());
  py::register_exception<ConfigError>(mod, "ConfigError", base.ptr());
  py::register_exception<NotProjectivelyFlatError>(mod, "NotProjectivelyFlatError", base.ptr());
  py::register_exception<ConstraintViolation>(mod, "ConstraintViolation", base.ptr());

  mod.def("list_suites", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& s : registered_suites()) out.emplace_back(s.id, s.summary);
    return out;
  });
  mod.def("explain", [](const std::string& id) { return suite_info(id).explain; }, py::arg("suite"));
  mod.def("default_tolerances", &default_tolerances);
  mod.def("run_suite_json", &run_suite_json, py::arg("config_json"), py::arg("tol_overrides") = std::vector<std::string>{},
          py::call_guard<py::gil_scoped_release>());

  py::class_<PhiSpec>(mod, "Phi")
      .def_static("general_j02", &PhiSpec::general_j02, py::arg("c"), py::arg("m"))
      .def_static("first_class", &PhiSpec::first_class, py::arg("k"))
      .def_static("second_class", &PhiSpec::second_class, py::arg("m"), py::arg("k"), py::arg("a1"))
      .def_static("third_class", &PhiSpec::third_class, py::arg("m"), py::arg("k"))
      .def_static("fourth_quadrature", &PhiSpec::fourth_quadrature, py::arg("m"), py::arg("k"), py::arg("b"))
      .def_static("fourth_closed_m2", &PhiSpec::fourth_closed_m2, py::arg("k"), py::arg("b"))
      .def_static("fourth_closed_m4", &PhiSpec::fourth_closed_m4, py::arg("k"), py::arg("b"))
      .def_static("fifth_class", &PhiSpec::fifth_class, py::arg("k1"), py::arg("k2"), py::arg("b"))
      .def_static("randers", &PhiSpec::randers)
      .def_static("square_randers", &PhiSpec::square_randers)
      .def_property_readonly("name", &PhiSpec::name)
      .def("__call__", [](const PhiSpec& p, double s) { return p(s); }, py::arg("s"))
      .def("derivatives", [](const PhiSpec& p, double s) {
        const PhiValues v = phi_eval(p, s);
        return py::make_tuple(v.phi, v.d1, v.d2);
      }, py::arg("s"))
      .def("__repr__", [](const PhiSpec& p) { return "<Phi " + p.name() + ">"; });

  mod.def("ode_residual", &ode_w51_residual, py::arg("phi"), py::arg("m"), py::arg("k"), py::arg("b"), py::arg("s"));

  py::class_<ABMetric>(mod, "Metric")
      .def_property_readonly("dim", &ABMetric::dim)
      .def_property_readonly("phi", &ABMetric::phi)
      .def("F", &f_eval, py::arg("x"), py::arg("y"))
      .def("fundamental_tensor", [](const ABMetric& M, const Vec<double>& x, const Vec<double>& y) {
        const Mat<double> g = fundamental_tensor(M, x, y);
        std::vector<std::vector<double>> out(g.dim(), std::vector<double>(g.dim()));
        for (int i = 0; i < g.dim(); ++i)
          for (int j = 0; j < g.dim(); ++j) out[i][j] = g(i, j);
        return out;
      }, py::arg("x"), py::arg("y"))
      .def("spray", [](const ABMetric& M, const Vec<double>& x, const Vec<double>& y) { return spray_generic(M, x, y); },
           py::arg("x"), py::arg("y"))
      .def("spray_structured",
           [](const ABMetric& M, const Vec<double>& x, const Vec<double>& y) { return spray_structured(M, x, y); },
           py::arg("x"), py::arg("y"))
      .def("projective_factor", [](const ABMetric& M, const Vec<double>& x, const Vec<double>& y) {
        return projective_factor(M, x, y);
      }, py::arg("x"), py::arg("y"))
      .def("flag_curvature", [](const ABMetric& M, const Vec<double>& x, const Vec<double>& y) {
        return flag_curvature_projflat(M, x, y);
      }, py::arg("x"), py::arg("y"));

  mod.def("randers_klein", [](int n, const Vec<double>& a, int sign) { return make_randers_klein(n, a, sign); },
          py::arg("n"), py::arg("a"), py::arg("sign") = 1);
  mod.def("square_klein", [](int n, const Vec<double>& a, int sign) { return make_square_klein(n, a, sign); },
          py::arg("n"), py::arg("a"), py::arg("sign") = 1);
  mod.def("eta_metric",
          [](int n, double m, double k, const std::string& kind, double A, double omega) {
            return make_third_class_eta(n, m, k, eta_field(kind, A, omega));
          },
          py::arg("n"), py::arg("m"), py::arg("k") = 0.0, py::arg("eta") = "trig", py::arg("A") = 0.3,
          py::arg("omega") = 1.0);
  mod.def("flat_parallel_metric", [](const Vec<double>& b, const PhiSpec& phi) { return ABMetric(flat_parallel(b), phi); },
          py::arg("b"), py::arg("phi"));

  mod.def("series_coefficients", [](double m, double k, double b, int J) { return series_solve_w51(m, k, b, J).coeffs; },
          py::arg("m"), py::arg("k"), py::arg("b"), py::arg("terms") = 4);
  mod.def("series_closed_form", &series_closed_form_coefficients, py::arg("m"), py::arg("k"), py::arg("b"));
}
