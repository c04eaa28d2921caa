// Python bindings: dense-matrix entry points plus JSON-in/JSON-out access to sweeps and the bench.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uscgibbs/sweep.hpp"

namespace py = pybind11;
using namespace uscgibbs;

namespace {

SystemModel system_from(const Matrix& h_sys, const Matrix& coupling_op) {
  return SystemModel(HermitianOperator(h_sys), HermitianOperator(coupling_op));
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mean-force Gibbs states and ultrastrong-coupling limits";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);
  py::register_exception<InvariantError>(m, "InvariantError", PyExc_ValueError);

  m.attr("__version__") = std::string(kToolVersion);
  m.def("eigensolver_backend", [] { return std::string(eigensolver_backend()); });

  m.def("reference_qutrit", [] {
    const SystemModel s = reference_qutrit();
    return py::make_tuple(Matrix(s.h_sys.matrix()), Matrix(s.coupling_op.matrix()));
  }, "(H_S, A) of the qutrit used by the default configs");

  m.def("gibbs", [](const Matrix& h, double beta) { return Matrix(compute_gibbs(HermitianOperator(h), beta).matrix()); },
        py::arg("h"), py::arg("beta"));
  m.def("mfgs", [](const Matrix& h, Index sys_dim, Index env_dim, double beta) {
    return Matrix(compute_mfgs(HermitianOperator(h), {sys_dim, env_dim}, beta).matrix());
  }, py::arg("h"), py::arg("sys_dim"), py::arg("env_dim"), py::arg("beta"),
        "Tr_E exp(-beta H) / Z for a system x environment Hamiltonian");
  m.def("partial_trace_env", [](const Matrix& rho, Index sys_dim, Index env_dim) {
    return Matrix(partial_trace_env(HermitianOperator(rho), {sys_dim, env_dim}).matrix());
  }, py::arg("rho"), py::arg("sys_dim"), py::arg("env_dim"));
  m.def("trace_distance", [](const Matrix& a, const Matrix& b) {
    return trace_distance(DensityMatrix(HermitianOperator(a)), DensityMatrix(HermitianOperator(b)));
  }, py::arg("rho"), py::arg("sigma"));
  m.def("usc_cl_gcl2", [](const Matrix& h_sys, const Matrix& a, double beta) {
    return Matrix(usc_cl_gcl2(system_from(h_sys, a), beta).state.matrix());
  }, py::arg("h_sys"), py::arg("coupling_op"), py::arg("beta"));

  m.def("_run_sweep", [](const std::string& config_json) {
    const SweepConfig cfg = parse_config_text(config_json);
    SweepResult r;
    {
      py::gil_scoped_release release;
      r = run_sweep(cfg);
    }
    return py::make_tuple(sweep_csv(r), sweep_report(cfg, r).dump());
  });
  m.def("_config_echo", [](const std::string& config_json) { return config_to_json(parse_config_text(config_json)).dump(); });
  m.def("_run_props", [](const std::string& config_json) {
    const SweepConfig cfg = parse_config_text(config_json);
    PropsReport r;
    {
      py::gil_scoped_release release;
      r = run_props(cfg.props);
    }
    return props_report_json(cfg.props, r).dump();
  });

  m.def("h_sin", &h_sin, py::arg("x"));
  m.def("h_hyp", &h_hyp, py::arg("x"));
  m.def("minimize_h", [](const std::string& kind) {
    if (kind != "sin" && kind != "hyp") throw ConfigError("kind must be \"sin\" or \"hyp\"");
    const HMinimum r = minimize_h(kind == "sin" ? HKind::sin : HKind::hyp);
    return py::make_tuple(r.x, r.h);
  }, py::arg("kind"), "(x, h) at the global minimum on [0, 50]");
  m.def("h_curves_csv", &h_curves_csv);
}
