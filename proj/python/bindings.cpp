#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "hmclab/cue.hpp"
#include "hmclab/dickman.hpp"
#include "hmclab/errors.hpp"
#include "hmclab/experiments.hpp"
#include "hmclab/hmc.hpp"
#include "hmclab/limitlaw.hpp"

namespace py = pybind11;
using namespace hmclab;

namespace {

py::array_t<cplx> to_array(const std::vector<cplx>& v) {
  py::array_t<cplx> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Seed make_seed(std::uint64_t root, std::vector<std::uint64_t> path) { return Seed(root, std::move(path)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Holomorphic multiplicative chaos simulation";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<SizeError>(m, "SizeError", PyExc_ValueError);
  py::register_exception<ResolutionError>(m, "ResolutionError", PyExc_ValueError);
  py::register_exception<NotPsdError>(m, "NotPsdError", PyExc_ArithmeticError);
  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("version", [] { return std::string(version()); });
  m.def("experiment_names", &experiment_names);

  m.def(
      "hmc_coeffs",
      [](std::size_t n, double theta, std::uint64_t seed, std::vector<std::uint64_t> path) {
        return to_array(sample_coeffs(n, 0, theta, make_seed(seed, std::move(path))).coeffs.coeffs);
      },
      py::arg("n"), py::arg("theta") = 1.0, py::arg("seed") = 20240917, py::arg("path") = std::vector<std::uint64_t>{},
      "Coefficients c_0..c_n of one chaos draw.");

  m.def(
      "split",
      [](std::size_t n, std::size_t r, std::size_t L, double theta, std::uint64_t seed,
         std::vector<std::uint64_t> path) {
        const HmcSample s = sample_coeffs(n, r, theta, make_seed(seed, std::move(path)));
        const SplitResult res = hmclab::split(s, SplitConfig{n, r, L});
        return py::make_tuple(res.good, res.bad, s.c(n + r));
      },
      py::arg("n"), py::arg("r"), py::arg("L"), py::arg("theta") = 1.0, py::arg("seed") = 20240917,
      py::arg("path") = std::vector<std::uint64_t>{}, "(good, bad, c_{n+r}) for one draw.");

  m.def(
      "cue_secular",
      [](std::size_t n_dim, std::uint64_t seed, std::vector<std::uint64_t> path) {
        return to_array(sample_secular_szego(n_dim, make_seed(seed, std::move(path))).coeffs);
      },
      py::arg("n_dim"), py::arg("seed") = 20240917, py::arg("path") = std::vector<std::uint64_t>{},
      "Secular coefficients of a CUE characteristic polynomial.");

  py::class_<DickmanTable>(m, "DickmanTable")
      .def(py::init([](double h, double x_max) { return solve_rho(h, x_max); }), py::arg("h") = 1e-4,
           py::arg("x_max") = 20.0)
      .def_property_readonly("h", &DickmanTable::h)
      .def_property_readonly("x_max", &DickmanTable::x_max)
      .def("rho", py::vectorize(&DickmanTable::rho))
      .def("cdf", py::vectorize(&DickmanTable::cdf))
      .def("quantile", &DickmanTable::quantile)
      .def("total_integral", &DickmanTable::total_integral);

  m.def("b_of_l", &b_of_l, py::arg("L"), py::arg("table"));
  m.def("limit_dickman_sum", &limit_dickman_sum, py::arg("L"), py::arg("table"));
  m.def("moment_formula", &moment_formula, py::arg("q"));
  m.def("tail_formula", py::vectorize(&tail_formula), py::arg("y"));

  m.def(
      "sample_limit",
      [](std::size_t count, std::uint64_t seed) {
        GaussianStream stream{Seed(seed)};
        std::vector<cplx> w(count);
        for (auto& x : w) x = sample_limit(stream).w;
        return to_array(w);
      },
      py::arg("count"), py::arg("seed") = 20240917, "Draws of the limit law sqrt(M1) Z.");

  m.def(
      "run",
      [](const std::string& config_json) {
        const auto config = ExperimentConfig::from_json(nlohmann::json::parse(config_json));
        RunManifest manifest;
        {
          py::gil_scoped_release release;
          manifest = run(config);
        }
        return manifest.to_json().dump();
      },
      py::arg("config_json"), "Runs an experiment and returns the manifest as JSON text.");
}
