// Copyright 2026 The adatrotter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "adatrotter/config.hpp"
#include "adatrotter/controller.hpp"
#include "adatrotter/errors.hpp"
#include "adatrotter/magnus.hpp"
#include "adatrotter/runner.hpp"
#include "adatrotter/statevector.hpp"
#include "adatrotter/trace_io.hpp"

namespace py = pybind11;
using namespace adatrotter;

namespace {

py::array_t<std::complex<double>> state_array(const StateVector &s) {
    const auto a = s.amplitudes();
    return py::array_t<std::complex<double>>(a.size(), a.data());
}

StateVector state_from_array(int num_sites,
                             const py::array_t<std::complex<double>> &amps) {
    std::vector<Complex> v(amps.data(), amps.data() + amps.size());
    return StateVector(num_sites, std::move(v));
}

StopCondition make_stop(std::optional<int> max_steps, std::optional<double> t_final) {
    StopCondition s;
    s.max_steps = max_steps;
    s.t_final = t_final;
    s.validate();
    return s;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Adaptive Trotter evolution of driven spin chains";
    m.attr("__version__") = version_string();

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError",
                                                            PyExc_ArithmeticError);
    py::register_exception<BranchError>(m, "BranchError", numerical.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", numerical.ptr());
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

    py::class_<DriveSchedule>(m, "DriveSchedule")
        .def_static("constant", &DriveSchedule::constant, py::arg("value"))
        .def_static("damped_cosine", &DriveSchedule::damped_cosine, py::arg("omega"),
                    py::arg("tau"), py::arg("offset") = 0.0, py::arg("amplitude") = 1.0)
        .def_static("custom", &DriveSchedule::custom, py::arg("f"))
        .def("__call__", &DriveSchedule::operator(), py::arg("t"))
        .def_property_readonly("kind", [](const DriveSchedule &d) { return to_string(d.kind); })
        .def_readonly("amplitude", &DriveSchedule::amplitude)
        .def_readonly("omega", &DriveSchedule::omega)
        .def_readonly("tau", &DriveSchedule::tau)
        .def_readonly("offset", &DriveSchedule::offset);

    py::class_<HamiltonianSpec>(m, "HamiltonianSpec")
        .def(py::init([](int L, double J_z, double h_x, double h_z, DriveSchedule g,
                         DriveSchedule f) {
                 HamiltonianSpec s;
                 s.num_sites = L;
                 s.J_z = J_z;
                 s.h_x = h_x;
                 s.h_z = h_z;
                 s.g = std::move(g);
                 s.f = std::move(f);
                 s.validate();
                 return s;
             }),
             py::arg("L"), py::arg("J_z") = 1.0, py::arg("h_x") = 1.0, py::arg("h_z") = 0.0,
             py::arg("g") = DriveSchedule::constant(1.0),
             py::arg("f") = DriveSchedule::constant(1.0))
        .def_readwrite("L", &HamiltonianSpec::num_sites)
        .def_readwrite("J_z", &HamiltonianSpec::J_z)
        .def_readwrite("h_x", &HamiltonianSpec::h_x)
        .def_readwrite("h_z", &HamiltonianSpec::h_z)
        .def_readwrite("g", &HamiltonianSpec::g)
        .def_readwrite("f", &HamiltonianSpec::f);

    py::class_<PauliOperator>(m, "PauliOperator")
        .def_property_readonly("num_sites", &PauliOperator::num_sites)
        .def("__len__", &PauliOperator::size)
        .def("terms",
             [](const PauliOperator &op) {
                 py::dict d;
                 for (const auto &[key, c] : op.terms()) {
                     PauliTerm t{op.num_sites(), key.x, key.z, c};
                     d[py::str(t.word())] = c;
                 }
                 return d;
             },
             "Mapping from Pauli word (site 0 first) to coefficient.")
        .def("coefficient",
             py::overload_cast<std::string_view>(&PauliOperator::coefficient, py::const_),
             py::arg("word"))
        .def("is_hermitian", &PauliOperator::is_hermitian, py::arg("tolerance") = 1e-12)
        .def("one_norm", &PauliOperator::one_norm)
        .def("max_coefficient_distance", &PauliOperator::max_coefficient_distance)
        .def("to_text", &PauliOperator::to_text)
        .def_static("from_text", &PauliOperator::from_text);

    m.def("static_operators",
          [](const HamiltonianSpec &s) {
              auto ops = build_static_operators(s);
              return py::make_tuple(ops.G, ops.F);
          },
          py::arg("spec"), "(G, F) for the chain.");
    m.def("piecewise_hamiltonian",
          [](const HamiltonianSpec &s, double t, double dt, int k) {
              return build_piecewise_hamiltonian(s, t, dt, k).op;
          },
          py::arg("spec"), py::arg("t"), py::arg("dt"), py::arg("k") = 5);
    m.def("truncation_error_norm", &truncation_error_norm, py::arg("spec"), py::arg("t"),
          py::arg("dt"), py::arg("k"));

    m.def("initial_state",
          [](int L, double theta) { return state_array(prepare_initial(L, theta)); },
          py::arg("L"), py::arg("theta"));
    m.def("magnetization",
          [](int L, const py::array_t<std::complex<double>> &psi, const std::string &axis) {
              if (axis != "x" && axis != "z") {
                  throw py::value_error("axis must be 'x' or 'z'");
              }
              return magnetization(state_from_array(L, psi),
                                   axis == "x" ? Axis::x : Axis::z);
          },
          py::arg("L"), py::arg("psi"), py::arg("axis"));

    py::class_<ToleranceSet>(m, "ToleranceSet")
        .def(py::init<>())
        .def_static("local", &ToleranceSet::local, py::arg("d_E"), py::arg("d_var"))
        .def_static("global_", &ToleranceSet::global, py::arg("dg_E"), py::arg("dg_var"))
        .def_readwrite("d_E", &ToleranceSet::d_E)
        .def_readwrite("d_var", &ToleranceSet::d_var)
        .def_readwrite("dg_E", &ToleranceSet::dg_E)
        .def_readwrite("dg_var", &ToleranceSet::dg_var);

    py::class_<StepPolicy>(m, "StepPolicy")
        .def(py::init([](double dt_min, double dt_max, double bisect_eps, int max_trials,
                         int k, bool halt_on_freeze) {
                 StepPolicy p;
                 p.dt_min = dt_min;
                 p.dt_max = dt_max;
                 p.bisect_eps = bisect_eps;
                 p.max_trials = max_trials;
                 p.k = k;
                 p.on_freeze = halt_on_freeze ? FreezeAction::halt : FreezeAction::continue_run;
                 p.validate();
                 return p;
             }),
             py::arg("dt_min") = 0.1, py::arg("dt_max") = 0.7, py::arg("bisect_eps") = 0.01,
             py::arg("max_trials") = 20, py::arg("k") = 5, py::arg("halt_on_freeze") = false)
        .def_readonly("dt_min", &StepPolicy::dt_min)
        .def_readonly("dt_max", &StepPolicy::dt_max)
        .def_readonly("bisect_eps", &StepPolicy::bisect_eps)
        .def_readonly("k", &StepPolicy::k)
        .def("trial_bound", &StepPolicy::trial_bound);

    py::class_<StepRecord>(m, "StepRecord")
        .def_readonly("m", &StepRecord::index)
        .def_readonly("t", &StepRecord::t)
        .def_readonly("dt", &StepRecord::dt)
        .def_readonly("trials", &StepRecord::trials)
        .def_readonly("frozen", &StepRecord::frozen)
        .def_readonly("E_i", &StepRecord::E_i)
        .def_readonly("E_f", &StepRecord::E_f)
        .def_readonly("var_i", &StepRecord::var_i)
        .def_readonly("var_f", &StepRecord::var_f)
        .def_readonly("cum_dE", &StepRecord::cum_dE)
        .def_readonly("cum_dVar", &StepRecord::cum_dVar)
        .def_readonly("Mx", &StepRecord::Mx)
        .def_readonly("Mz", &StepRecord::Mz)
        .def_readonly("exact_Mx", &StepRecord::exact_Mx)
        .def_readonly("exact_Mz", &StepRecord::exact_Mz);

    py::class_<TraceLog>(m, "TraceLog")
        .def_readonly("steps", &TraceLog::steps)
        .def_readonly("has_exact", &TraceLog::has_exact)
        .def_readonly("halted_on_freeze", &TraceLog::halted_on_freeze)
        .def_readonly("max_norm_drift", &TraceLog::max_norm_drift)
        .def("final_time", &TraceLog::final_time)
        .def("mean_trials", &TraceLog::mean_trials)
        .def("frozen_steps", &TraceLog::frozen_steps)
        .def("final_state", [](const TraceLog &l) { return state_array(l.final_state); })
        .def("to_csv", [](const TraceLog &l) { return trace_to_csv(l); })
        .def_static("from_csv", [](const std::string &text) { return trace_from_csv(text); });

    auto oracle_opts = [](bool enabled, double tol) {
        OracleOptions o;
        o.enabled = enabled;
        o.exact.tolerance = tol;
        return o;
    };
    m.def("run_adaptive",
          [oracle_opts](const HamiltonianSpec &s, double theta, const ToleranceSet &tol,
                        const StepPolicy &policy, std::optional<int> max_steps,
                        std::optional<double> t_final, bool oracle, double oracle_tolerance) {
              py::gil_scoped_release release;
              return run_adaptive(s, theta, tol, policy, make_stop(max_steps, t_final),
                                  oracle_opts(oracle, oracle_tolerance));
          },
          py::arg("spec"), py::arg("theta"), py::arg("tolerances"), py::arg("policy"),
          py::arg("max_steps") = py::none(), py::arg("t_final") = py::none(),
          py::arg("oracle") = false, py::arg("oracle_tolerance") = 1e-10);
    m.def("run_fixed",
          [oracle_opts](const HamiltonianSpec &s, double theta, double dt, int steps,
                        bool oracle, int k) {
              py::gil_scoped_release release;
              return run_fixed(s, theta, dt, steps, oracle_opts(oracle, 1e-10), k);
          },
          py::arg("spec"), py::arg("theta"), py::arg("dt"), py::arg("steps"),
          py::arg("oracle") = false, py::arg("k") = 5);

    m.def("load_config",
          [](const std::filesystem::path &path, const std::vector<std::string> &overrides) {
              return config_to_json(load_config(path, overrides)).dump();
          },
          py::arg("path"), py::arg("overrides") = std::vector<std::string>{},
          "Validated, fully explicit config as a JSON string.");
    m.def("run_config",
          [](const std::filesystem::path &path, const std::vector<std::string> &overrides) {
              const auto cfg = load_config(path, overrides);
              DispatchResult r;
              {
                  py::gil_scoped_release release;
                  r = dispatch_guarded(cfg);
              }
              std::vector<std::string> artifacts;
              for (const auto &p : r.artifacts) {
                  artifacts.push_back(p.string());
              }
              return py::make_tuple(r.exit_code, r.message, artifacts);
          },
          py::arg("path"), py::arg("overrides") = std::vector<std::string>{},
          "Same as the command-line runner: returns (exit_code, message, artifacts).");
}
