// Python extension exposing the solver's main operations: model parameters,
// simulation states with numpy views, the relaxed exponential-integrator
// stepper, energy reports, and the config-driven initial data.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <string>
#include <vector>

#include "smectic/energy.hpp"
#include "smectic/field.hpp"
#include "smectic/io.hpp"
#include "smectic/stepper.hpp"
#include "smectic/variations.hpp"

namespace py = pybind11;
using namespace smectic;

namespace {

std::vector<py::ssize_t> grid_shape(const PeriodicGrid& g) {
  return std::vector<py::ssize_t>(static_cast<std::size_t>(g.d), g.J);
}

py::array_t<double> field_to_numpy(const ScalarField& f) {
  py::array_t<double> out(grid_shape(f.grid()));
  std::copy(f.data(), f.data() + f.size(), out.mutable_data());
  return out;
}

void numpy_to_field(const py::array_t<double>& a, ScalarField& f) {
  auto buf = a.attr("ravel")().cast<py::array_t<double>>();
  if (static_cast<std::size_t>(buf.size()) != f.size())
    throw std::invalid_argument("array size does not match the grid");
  std::copy(buf.data(), buf.data() + buf.size(), f.data());
}

SchemeForm parse_form(const std::string& form) {
  if (form == "etd") return SchemeForm::etd;
  if (form == "implicit") return SchemeForm::implicit;
  throw std::invalid_argument("form must be \"etd\" or \"implicit\"");
}

py::dict report_to_dict(const SimState& st, const StepReport& rep) {
  py::dict d;
  d["step"] = st.step;
  d["t"] = st.t;
  d["s"] = st.s;
  d["xi"] = rep.xi;
  d["s_tilde"] = rep.s_tilde;
  d["R"] = rep.R;
  d["g"] = rep.g;
  d["e1h_before"] = rep.e1h_before;
  d["e1h_after"] = rep.e1h_after;
  d["energy_before"] = rep.energy_before;
  d["energy_after"] = rep.energy_after;
  d["max_q_frobenius"] = rep.mbp;
  d["max_abs_u"] = rep.max_abs_u;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Relaxed exponential-integrator solver for the coupled Q-tensor / "
      "smectic density gradient flow on periodic grids";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DivergenceError& e) {
      const std::string msg =
          "divergence:step=" + std::to_string(e.step) + " " + e.what();
      PyErr_SetString(PyExc_RuntimeError, msg.c_str());
    } catch (const ConfigError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<ModelParams>(m, "Params")
      .def(py::init<>())
      .def_readwrite("K", &ModelParams::K)
      .def_readwrite("A", &ModelParams::A)
      .def_readwrite("B", &ModelParams::B)
      .def_readwrite("C", &ModelParams::C)
      .def_readwrite("a", &ModelParams::a)
      .def_readwrite("b", &ModelParams::b)
      .def_readwrite("c", &ModelParams::c)
      .def_readwrite("B0", &ModelParams::B0)
      .def_readwrite("q", &ModelParams::q)
      .def_readwrite("s_plus", &ModelParams::s_plus)
      .def_readwrite("kappa1", &ModelParams::kappa1)
      .def_readwrite("kappa2", &ModelParams::kappa2)
      .def_readwrite("eta0", &ModelParams::eta0)
      .def_readwrite("d", &ModelParams::d)
      .def_readwrite("coupled", &ModelParams::coupled)
      .def("validate", &ModelParams::validate)
      .def("__repr__", [](const ModelParams& p) {
        return "Params(d=" + std::to_string(p.d) +
               ", K=" + std::to_string(p.K) +
               ", kappa1=" + std::to_string(p.kappa1) +
               ", kappa2=" + std::to_string(p.kappa2) +
               ", eta0=" + std::to_string(p.eta0) + ")";
      });

  py::class_<SimState>(m, "State")
      .def(py::init<>())
      .def_readwrite("s", &SimState::s)
      .def_readwrite("t", &SimState::t)
      .def_readwrite("step", &SimState::step)
      .def_property_readonly(
          "d", [](const SimState& st) { return st.Q.grid().d; })
      .def_property_readonly(
          "J", [](const SimState& st) { return st.Q.grid().J; })
      .def_property_readonly(
          "L", [](const SimState& st) { return st.Q.grid().L; })
      .def_property_readonly("n_q_components",
                             [](const SimState& st) {
                               return st.Q.components();
                             })
      .def_property_readonly(
          "u", [](const SimState& st) { return field_to_numpy(st.u); })
      .def("q_component",
           [](const SimState& st, int c) {
             if (c < 0 || c >= st.Q.components())
               throw std::out_of_range("q component index");
             return field_to_numpy(st.Q.comp(c));
           },
           py::arg("c"),
           "Stored independent component of the traceless tensor field")
      .def("set_u",
           [](SimState& st, const py::array_t<double>& a) {
             numpy_to_field(a, st.u);
           })
      .def("set_q_component",
           [](SimState& st, int c, const py::array_t<double>& a) {
             if (c < 0 || c >= st.Q.components())
               throw std::out_of_range("q component index");
             numpy_to_field(a, st.Q.comp(c));
           })
      .def("max_q_frobenius",
           [](const SimState& st) {
             const ScalarField f = frobenius_pointwise(st.Q);
             double mx = 0;
             for (std::size_t i = 0; i < f.size(); ++i)
               mx = std::max(mx, std::abs(f[i]));
             return mx;
           })
      .def("copy", [](const SimState& st) { return st; })
      .def("__repr__", [](const SimState& st) {
        return "State(d=" + std::to_string(st.Q.grid().d) +
               ", J=" + std::to_string(st.Q.grid().J) +
               ", step=" + std::to_string(st.step) +
               ", t=" + std::to_string(st.t) + ")";
      });

  m.def(
      "initial_state",
      [](const std::string& config_json) {
        return initial_state(parse_config_text(config_json));
      },
      py::arg("config_json") = "{}",
      "Build the initial state for a JSON config (defaults for omitted keys)");

  m.def("config_defaults",
        [] { return effective_config_json(RunConfig{}); },
        "The fully defaulted config document as JSON text");

  m.def(
      "run_steps",
      [](const SimState& state, double tau, long n_steps, ModelParams p,
         const std::string& form, bool reset_s) {
        p.d = state.Q.grid().d;
        py::list reports;
        SimState out =
            run(state, tau, n_steps, p, parse_form(form),
                [&](const SimState& st, const StepReport& rep) {
                  reports.append(report_to_dict(st, rep));
                },
                reset_s);
        return py::make_tuple(out, reports);
      },
      py::arg("state"), py::arg("tau"), py::arg("n_steps"), py::arg("params"),
      py::arg("form") = "etd", py::arg("reset_s") = true,
      "Advance n_steps; returns (final_state, per-step report dicts)");

  m.def(
      "energy",
      [](const SimState& st, ModelParams p) {
        p.d = st.Q.grid().d;
        const EnergyReport r = modified_energy(st.Q, st.u, st.s, p);
        py::dict d;
        d["E0"] = r.E0;
        d["E1h"] = r.E1;
        d["modified"] = r.modified;
        d["s"] = r.s;
        d["g"] = r.g;
        py::dict terms;
        terms["elastic"] = r.terms.elastic;
        terms["bulk_nematic"] = r.terms.bulk_nematic;
        terms["bulk_smectic"] = r.terms.bulk_smectic;
        terms["coupling_cross"] = r.terms.coupling_cross;
        terms["coupling_quad"] = r.terms.coupling_quad;
        d["terms"] = terms;
        return d;
      },
      py::arg("state"), py::arg("params"),
      "Modified-energy report with the per-term breakdown");

  m.def("kappa0", &kappa0_bound, py::arg("params"), py::arg("eta"),
        py::arg("u_inf"),
        "Stabilizer threshold for the maximum-bound principle");
}
