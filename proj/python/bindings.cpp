#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "metaising/droplets.hpp"
#include "metaising/energy.hpp"
#include "metaising/experiment.hpp"
#include "metaising/kmc.hpp"
#include "metaising/landscape.hpp"

namespace py = pybind11;
using namespace metaising;

namespace {

// Holder so the variant is bound as one opaque class instead of going through the stl caster.
struct Model {
  ModelParams p;
};

Model model(const std::string& type, const py::dict& p) {
  nlohmann::json params;
  for (auto item : p) params[py::str(item.first).cast<std::string>()] = item.second.cast<double>();
  return {params_from_json({{"type", type}, {"params", params}})};
}

}  // namespace

PYBIND11_MODULE(_metaising, m) {
  m.doc() = "Modified Ising models on a torus: energies, critical droplets, landscapes, and Glauber KMC";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DropletFitError>(m, "DropletFitError", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
  py::register_exception<EnumerationCapError>(m, "EnumerationCapError", PyExc_ValueError);

  py::class_<Torus>(m, "Torus")
      .def(py::init<int>())
      .def_property_readonly("side", &Torus::side)
      .def_property_readonly("size", &Torus::size)
      .def("site", &Torus::site);

  py::class_<SpinConfiguration>(m, "SpinConfiguration")
      .def_static("all_minus", &SpinConfiguration::all_minus)
      .def_static("all_plus", &SpinConfiguration::all_plus)
      .def_static("from_sites", &SpinConfiguration::from_sites)
      .def_static("parse", [](const std::string& s) { return SpinConfiguration::parse(s); })
      .def("flipped", &SpinConfiguration::flipped)
      .def("plus", &SpinConfiguration::plus)
      .def("count", &SpinConfiguration::count)
      .def("plus_sites", &SpinConfiguration::plus_sites)
      .def("__str__", &SpinConfiguration::to_string)
      .def("__eq__", &SpinConfiguration::operator==);

  py::class_<Model>(m, "Model")
      .def(py::init(&model), py::arg("type"), py::arg("params"))
      .def_property_readonly("name", [](const Model& x) { return model_name(x.p); })
      .def("to_json", [](const Model& x) { return params_to_json(x.p).dump(); });

  m.def("energy", [](const Model& x, const SpinConfiguration& c) { return energy(x.p, c); });
  m.def("energy_geometric", [](const Model& x, const SpinConfiguration& c) { return energy_geometric(x.p, c); });
  m.def("delta_energy", [](const Model& x, const SpinConfiguration& c, Site s) { return delta_energy(x.p, c, s); });
  m.def("metropolis_rate",
        [](const Model& x, double beta, const SpinConfiguration& c, Site s) { return metropolis_rate(x.p, beta, c, s); });
  m.def("boundary_lengths", &boundary_lengths);
  m.def("corner_count", &corner_count);
  m.def("assumptions_hold", [](const Model& x, const Torus& t) { return validate_assumptions(x.p, t).all_passed(); });

  m.def("critical_geometry", [](const Model& x, const Torus& t) {
    const ModelParams& p = x.p;
    const auto g = critical_geometry(p, t);
    py::dict d;
    d["model"] = g.model;
    d["gamma"] = g.gamma;
    d["inv_K"] = py::make_tuple(g.inv_k.num(), g.inv_k.den());
    d["L_V"] = g.l_v;
    d["ell"] = g.ell;
    d["D"] = g.d_star;
    d["L_star"] = g.l_star;
    d["l_b"] = g.l_b;
    d["l_h"] = g.l_h;
    d["assumptions_hold"] = g.assumptions_hold;
    return d;
  });
  m.def("combinatorial_prefactor", [](const Model& x, const Torus& t) {
    const ModelParams& p = x.p;
    const auto r = combinatorial_prefactor(p, t);
    return py::make_tuple(r.inv_k.num(), r.inv_k.den());
  });
  m.def("critical_states", [](const Model& x, const Torus& t) {
    const ModelParams& p = x.p;
    std::vector<std::string> out;
    for (const auto& c : enumerate_critical(p, t).critical) out.push_back(c.config.to_string());
    return out;
  });
  m.def("reference_path_energies", [](const Model& x, const Torus& t) { return reference_path(x.p, t).energies; });

  m.def("oracle", [](const Model& x, int side) {
    const ModelParams& p = x.p;
    const StateSpace space{Torus(side)};
    const auto r = analyze_landscape(p, space);
    py::dict d;
    d["gamma"] = r.gamma;
    d["h1"] = r.h1;
    d["inv_K"] = r.inv_k;
    d["critical_count"] = r.gate.critical.size();
    d["protocritical_count"] = r.gate.protocritical.size();
    return d;
  });
  m.def("exact_mean_hitting_time", [](const Model& x, int side, double beta) {
    const ModelParams& p = x.p;
    const StateSpace space{Torus(side)};
    return exact_mean_hitting_time(p, space, beta, space.all_minus(), space.all_plus());
  });
  m.def("spectral_gap", [](const Model& x, int side, double beta) {
    const ModelParams& p = x.p;
    return spectral_gap(p, StateSpace{Torus(side)}, beta);
  });

  m.def(
      "simulate",
      [](const Model& x, int side, double beta, std::size_t replicas, std::uint64_t seed, double budget,
         double gamma) {
        const ModelParams& p = x.p;
        const Torus t(side);
        StateSet stop(t);
        stop.insert(SpinConfiguration::all_plus(t));
        KmcOptions opt;
        opt.budget = budget;
        if (!std::isnan(gamma)) opt.gamma = gamma;
        const auto st = sample_transition(p, beta, t, stop, nullptr, replicas, seed, opt);
        std::vector<double> taus;
        for (const auto& s : st.samples) taus.push_back(s.hitting_time);
        py::dict d;
        d["mean"] = st.mean;
        d["se"] = st.standard_error;
        d["ks"] = st.ks;
        d["events"] = st.total_events;
        d["taus"] = taus;
        return d;
      },
      py::arg("model"), py::arg("side"), py::arg("beta"), py::arg("replicas"), py::arg("seed") = 1,
      py::arg("budget") = 1e9, py::arg("gamma") = std::nan(""));

  m.def("fit_gamma", [](const std::vector<double>& b, const std::vector<double>& t) {
    const auto f = fit_gamma(b, t);
    return py::make_tuple(f.slope, f.intercept, f.slope_se);
  });
}
