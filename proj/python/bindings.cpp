#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "ehkit/catalog.hpp"
#include "ehkit/errors.hpp"
#include "ehkit/pipeline.hpp"
#include "ehkit/quantum.hpp"
#include "ehkit/serialize.hpp"
#include "ehkit/spectral.hpp"
#include "ehkit/transfer.hpp"
#include "ehkit/wigner.hpp"

namespace py = pybind11;
using Json = nlohmann::json;

namespace {

py::object json_to_py(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null:
      return py::none();
    case Json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case Json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case Json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case Json::value_t::number_float:
      return py::float_(j.get<double>());
    case Json::value_t::string:
      return py::str(j.get<std::string>());
    case Json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case Json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
      return out;
    }
    default:
      throw ehkit::InvalidArgument("unsupported JSON payload");
  }
}

Json py_to_json(py::handle h) {
  if (h.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
  if (py::isinstance<py::int_>(h)) return h.cast<std::int64_t>();
  if (py::isinstance<py::float_>(h)) return h.cast<double>();
  if (py::isinstance<py::str>(h)) return h.cast<std::string>();
  if (py::isinstance<py::dict>(h)) {
    Json out = Json::object();
    for (auto item : h.cast<py::dict>())
      out[item.first.cast<std::string>()] = py_to_json(item.second);
    return out;
  }
  if (py::isinstance<py::list>(h) || py::isinstance<py::tuple>(h)) {
    Json out = Json::array();
    for (auto item : h.cast<py::sequence>()) out.push_back(py_to_json(item));
    return out;
  }
  throw ehkit::InvalidArgument("config values must be JSON-compatible");
}

py::object run_from_dict(const py::dict& cfg) {
  const ehkit::RunConfig config = ehkit::config_from_json(py_to_json(cfg));
  const ehkit::RunReport report = ehkit::run(config);
  return json_to_py(ehkit::report_to_json(report, config.with_timestamp));
}

py::object classify_map(const std::string& system, std::size_t cells, std::size_t samples,
                        std::uint64_t seed) {
  const ehkit::ClassicalSystemSpec spec = ehkit::classical_system(system);
  const std::size_t n = cells ? cells : spec.default_cells;
  const ehkit::SpacePtr space = ehkit::make_uniform_space(n, spec.map.domain());
  const ehkit::TransferOperator p = ehkit::ulam_operator(spec.map, space, samples, seed);
  const ehkit::SpectralDecomposition d = ehkit::extract_decomposition(p);
  const ehkit::EHClassification cls = ehkit::classify(d);
  Json out = ehkit::decomposition_to_json(d, cls);
  out["verdict"] = cls.verdict();
  out["cells"] = n;
  return json_to_py(out);
}

py::object classify_quantum_model(const std::string& system, double hbar, long long horizon,
                                  double tol) {
  const ehkit::QuantumSystemModel model = ehkit::quantum_system(system, hbar);
  return json_to_py(ehkit::quantum_to_json(ehkit::classify_quantum(model, horizon, tol)));
}

py::object two_level(double e1, double e2, double hbar, double rho11, double rho22,
                     double rho12_re, double rho12_im, double o11, double o22, double o12_re,
                     double o12_im, long long cesaro_m, long long horizon) {
  const ehkit::TwoLevelReport rep = ehkit::two_level_demo(
      e1, e2, hbar, rho11, rho22, {rho12_re, rho12_im}, o11, o22, {o12_re, o12_im}, cesaro_m,
      horizon);
  return json_to_py(ehkit::two_level_to_json(rep));
}

py::object wigner_gaussian_state(double q0, double p0, double sigma, double hbar, std::size_t d,
                                 double qmin, double qmax) {
  const Eigen::VectorXd grid = ehkit::uniform_qgrid(d, qmin, qmax);
  const ehkit::PositionGridOperator rho = ehkit::PositionGridOperator::state_from_wavefunction(
      grid, ehkit::gaussian_wavepacket(grid, q0, p0, sigma, hbar), hbar);
  const ehkit::PhaseSpaceFunction w = ehkit::wigner_of_state(rho);
  Json out = ehkit::phase_space_to_json(w);
  out["integral"] = w.integral();
  return json_to_py(out);
}

py::object star_scaling(const std::vector<double>& hbars) {
  return json_to_py(ehkit::scaling_to_json(ehkit::star_product_scaling_gaussian(hbars)));
}

py::object moyal_scaling(const std::vector<double>& hbars) {
  return json_to_py(ehkit::scaling_to_json(ehkit::moyal_bracket_scaling_gaussian(hbars)));
}

}  // namespace

PYBIND11_MODULE(_ehkit, m) {
  m.doc() = "spectral classification of maps and quantum models, with phase-space checks";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ehkit::InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ehkit::Error& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });

  m.def("version", [] { return std::string(ehkit::version_string()); },
        "toolkit version string");
  m.def("catalog", [] { return json_to_py(ehkit::catalog_to_json()); },
        "built-in systems with their expected verdicts");
  m.def("run", &run_from_dict, py::arg("config"),
        "execute a pipeline from a config dict and return the report dict");
  m.def("classify_map", &classify_map, py::arg("system"), py::arg("cells") = 0,
        py::arg("samples") = 1000, py::arg("seed") = 0x5eed,
        "Ulam discretization plus spectral decomposition and verdict");
  m.def("classify_quantum", &classify_quantum_model, py::arg("system"), py::arg("hbar") = 1.0,
        py::arg("horizon") = 2000, py::arg("tol") = 1e-3,
        "spectral-split classification of a built-in quantum model");
  m.def("two_level", &two_level, py::arg("e1") = 2.0, py::arg("e2") = 1.0,
        py::arg("hbar") = 1.0, py::arg("rho11") = 0.6, py::arg("rho22") = 0.4,
        py::arg("rho12_re") = 0.3, py::arg("rho12_im") = 0.1, py::arg("o11") = 1.0,
        py::arg("o22") = -0.5, py::arg("o12_re") = 0.4, py::arg("o12_im") = 0.2,
        py::arg("cesaro_m") = 100000, py::arg("horizon") = 1000,
        "worked two-level system with Cesaro averages");
  m.def("wigner_gaussian_state", &wigner_gaussian_state, py::arg("q0") = 0.05,
        py::arg("p0") = 0.4, py::arg("sigma") = 0.1, py::arg("hbar") = 0.1,
        py::arg("points") = 128, py::arg("qmin") = -1.0, py::arg("qmax") = 1.0,
        "Wigner function of a Gaussian wavepacket on a position grid");
  m.def("star_product_scaling", &star_scaling, py::arg("hbars"),
        "star-product first-order deviation scan over decreasing hbar");
  m.def("moyal_bracket_scaling", &moyal_scaling, py::arg("hbars"),
        "Moyal-vs-Poisson deviation scan over decreasing hbar");
}
