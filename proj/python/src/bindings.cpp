#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stochaction/acceptance.hpp"
#include "stochaction/runner.hpp"
#include "stochaction/scenario.hpp"

namespace py = pybind11;
namespace sa = stochaction;

namespace {

// Configs cross the boundary as JSON text; the Python side does the
// dict <-> str conversion.
sa::Scenario scenario_of(const std::string& text) { return sa::parse_config(text, "<python>"); }

py::array_t<double> positions_array(const std::vector<sa::Point>& pts, int dim) {
  py::array_t<double> out({static_cast<py::ssize_t>(pts.size()), static_cast<py::ssize_t>(dim)});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int a = 0; a < dim; ++a) v(i, a) = pts[i][a];
  }
  return out;
}

py::dict wavefunction_dict(const sa::WaveFunction& w) {
  const sa::SpatialGrid& g = w.psi.grid();
  const int dim = g.dim();
  py::array_t<double> q({static_cast<py::ssize_t>(g.size()), static_cast<py::ssize_t>(dim)});
  py::array_t<std::complex<double>> psi(static_cast<py::ssize_t>(g.size()));
  auto qv = q.mutable_unchecked<2>();
  auto pv = psi.mutable_unchecked<1>();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const sa::Point p = g.point(i);
    for (int a = 0; a < dim; ++a) qv(i, a) = p[a];
    pv(i) = w.psi[i];
  }
  py::dict d;
  d["time"] = w.time;
  d["q"] = q;
  d["psi"] = psi;
  if (dim == 1) {
    d["shape"] = py::make_tuple(g.points(0));
  } else {
    d["shape"] = py::make_tuple(g.points(0), g.points(1));
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_stochaction, m) {
  m.doc() = "Stochastic-action simulator core";

  // Later registrations are tried first, so the subclass goes last.
  auto config_error = py::register_exception<sa::ConfigurationError>(m, "ConfigurationError", PyExc_ValueError);
  py::register_exception<sa::ValidationError>(m, "ValidationError", config_error.ptr());
  py::register_exception<sa::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<sa::DomainError>(m, "DomainError", PyExc_ValueError);

  m.def("preset_names", &sa::preset_names);
  m.def("preset_json", [](const std::string& name) { return sa::dump(sa::preset(name)).dump(); }, py::arg("name"));
  m.def("normalize_json", [](const std::string& text) { return sa::dump(scenario_of(text)).dump(); },
        py::arg("config"), "Validate a config and return it with every default filled in.");

  m.def("initial_state", [](const std::string& text) { return wavefunction_dict(scenario_of(text).initial_wavefunction()); },
        py::arg("config"));

  m.def(
      "ensemble",
      [](const std::string& text, std::optional<std::uint64_t> seed, std::optional<std::size_t> trajectories,
         unsigned workers) {
        sa::Scenario s = scenario_of(text);
        if (seed) s.stochastic.seed = *seed;
        if (trajectories) s.trajectories = *trajectories;
        s.validate();
        sa::EnsembleConfig cfg = s.ensemble_config();
        cfg.workers = workers;
        const sa::WaveFunction psi0 = s.initial_wavefunction();
        sa::EnsembleResult res;
        {
          py::gil_scoped_release release;
          res = sa::run_ensemble(cfg, psi0);
        }
        py::list snaps;
        for (const auto& snap : res.snapshots) {
          py::dict d = wavefunction_dict(snap.state);
          d["positions"] = positions_array(snap.positions, res.dim);
          d["momenta"] = positions_array(snap.momenta, res.dim);
          py::array_t<bool> alive(static_cast<py::ssize_t>(snap.alive.size()));
          auto av = alive.mutable_unchecked<1>();
          for (std::size_t i = 0; i < snap.alive.size(); ++i) av(i) = snap.alive[i] != 0;
          d["alive"] = alive;
          snaps.append(d);
        }
        return snaps;
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("trajectories") = py::none(), py::arg("workers") = 0);

  m.def(
      "sample_deviations",
      [](double lambda_mag, std::size_t n, std::uint64_t seed, int sign) {
        sa::StochasticParams p;
        p.lambda_mag = lambda_mag;
        p.validate();
        sa::RngStream rng(seed, 0, sa::StreamPurpose::deviation);
        py::array_t<double> out(static_cast<py::ssize_t>(n));
        auto v = out.mutable_unchecked<1>();
        for (std::size_t i = 0; i < n; ++i) v(i) = sa::sample_deviation(p, sign, rng).value;
        return out;
      },
      py::arg("lambda_mag"), py::arg("n"), py::arg("seed") = 0, py::arg("sign") = 1);

  m.def(
      "run",
      [](const std::string& text, const std::string& out_dir, std::optional<std::uint64_t> seed,
         std::optional<std::size_t> trajectories, bool references, unsigned workers) {
        sa::RunOptions o;
        o.seed = seed;
        o.trajectories = trajectories;
        o.track_references = references;
        o.workers = workers;
        const sa::Scenario s = scenario_of(text);
        sa::RunSummary r;
        {
          py::gil_scoped_release release;
          r = sa::run_scenario(s, out_dir, o);
        }
        nlohmann::json obs = nlohmann::json::array();
        for (const auto& x : r.observables) obs.push_back(sa::to_json(x));
        nlohmann::json j = {{"scenario", r.scenario}, {"seed", r.seed}, {"config_hash", r.config_hash},
                            {"manifest_hash", r.manifest_hash}, {"observables", obs}};
        if (r.rms_classical) j["rms_classical"] = *r.rms_classical;
        if (r.rms_bohmian) j["rms_bohmian"] = *r.rms_bohmian;
        return j.dump();
      },
      py::arg("config"), py::arg("out_dir"), py::arg("seed") = py::none(), py::arg("trajectories") = py::none(),
      py::arg("references") = false, py::arg("workers") = 0);

  m.def(
      "verify",
      [](const std::string& suite, const std::vector<int>& only) {
        sa::SuiteOptions o;
        o.suite = suite;
        o.only.insert(only.begin(), only.end());
        std::vector<sa::CriterionResult> r;
        {
          py::gil_scoped_release release;
          r = sa::run_acceptance(o);
        }
        return sa::to_json(r).dump();
      },
      py::arg("suite") = "quick", py::arg("only") = std::vector<int>{});
}
