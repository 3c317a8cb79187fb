#include "stochaction/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace stochaction {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw ValidationError("cli", field, what);
}

// Reads one JSON object and remembers which keys were consumed so that
// leftovers can be rejected.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number()) invalid(field(key), "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) invalid(field(key), "must be finite");
    return x;
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) invalid(field(key), "expected an integer");
    return v->get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer() && v->get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v->get<std::int64_t>());
    invalid(field(key), "expected a nonnegative integer");
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_string()) invalid(field(key), "expected a string");
    return v->get<std::string>();
  }

  // A number (1D) or an array of `dim` numbers.
  Point point(const std::string& key, int dim, Point fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    Point p{0.0, 0.0};
    if (v->is_number() && dim == 1) {
      p[0] = v->get<double>();
    } else if (v->is_array() && static_cast<int>(v->size()) == dim) {
      for (int a = 0; a < dim; ++a) {
        if (!(*v)[a].is_number()) invalid(field(key), "expected numbers");
        p[a] = (*v)[a].get<double>();
      }
    } else {
      invalid(field(key), "expected " + std::to_string(dim) + " number(s)");
    }
    for (int a = 0; a < dim; ++a) {
      if (!std::isfinite(p[a])) invalid(field(key), "must be finite");
    }
    return p;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    if (!v->is_array()) invalid(field(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : *v) {
      if (!x.is_number()) invalid(field(key), "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) invalid(field(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json point_json(const Point& p, int dim) {
  if (dim == 1) return json::array({p[0]});
  return json::array({p[0], p[1]});
}

const std::map<std::string, InitialState::Kind>& kind_names() {
  static const std::map<std::string, InitialState::Kind> names = {
      {"gaussian", InitialState::Kind::gaussian},
      {"oscillator_eigenstate", InitialState::Kind::oscillator_eigenstate},
      {"superposition", InitialState::Kind::superposition},
      {"vortex", InitialState::Kind::vortex}};
  return names;
}

std::string kind_name(InitialState::Kind k) {
  for (const auto& [name, kind] : kind_names()) {
    if (kind == k) return name;
  }
  return "gaussian";
}

InitialState read_initial(const json& j, const std::string& path, int dim) {
  ObjectReader r(j, path);
  InitialState s;
  const std::string kind = r.text("kind", "gaussian");
  auto it = kind_names().find(kind);
  if (it == kind_names().end()) invalid(r.field("kind"), "unknown initial state '" + kind + "'");
  s.kind = it->second;
  switch (s.kind) {
    case InitialState::Kind::gaussian:
      s.center = r.point("center", dim, s.center);
      s.width = r.point("width", dim, {1.0, 1.0});
      s.boost = r.point("boost", dim, s.boost);
      break;
    case InitialState::Kind::oscillator_eigenstate:
      s.level = static_cast<int>(r.integer("level", 0));
      break;
    case InitialState::Kind::vortex:
      s.center = r.point("center", dim, s.center);
      s.width[0] = r.number("width", 1.0);
      s.charge = static_cast<int>(r.integer("charge", 1));
      break;
    case InitialState::Kind::superposition: {
      const json* terms = r.get("terms");
      if (!terms || !terms->is_array() || terms->empty()) invalid(r.field("terms"), "expected a non-empty array");
      for (std::size_t k = 0; k < terms->size(); ++k) {
        const std::string tp = r.field("terms") + "[" + std::to_string(k) + "]";
        ObjectReader t((*terms)[k], tp);
        s.amplitudes.push_back(t.number("amplitude", 1.0));
        s.phases.push_back(t.number("phase", 0.0));
        const json* st = t.get("state");
        if (!st) invalid(t.field("state"), "missing");
        s.terms.push_back(read_initial(*st, t.field("state"), dim));
        t.finish();
      }
      break;
    }
  }
  r.finish();
  return s;
}

json initial_json(const InitialState& s, int dim) {
  json j = {{"kind", kind_name(s.kind)}};
  switch (s.kind) {
    case InitialState::Kind::gaussian:
      j["center"] = point_json(s.center, dim);
      j["width"] = point_json(s.width, dim);
      j["boost"] = point_json(s.boost, dim);
      break;
    case InitialState::Kind::oscillator_eigenstate:
      j["level"] = s.level;
      break;
    case InitialState::Kind::vortex:
      j["center"] = point_json(s.center, dim);
      j["width"] = s.width[0];
      j["charge"] = s.charge;
      break;
    case InitialState::Kind::superposition: {
      json terms = json::array();
      for (std::size_t k = 0; k < s.terms.size(); ++k) {
        terms.push_back({{"amplitude", s.amplitudes[k]}, {"phase", s.phases[k]}, {"state", initial_json(s.terms[k], dim)}});
      }
      j["terms"] = terms;
      break;
    }
  }
  return j;
}

void validate_initial(const InitialState& s, const Scenario& sc, const std::string& path) {
  const int dim = sc.hamiltonian.dim;
  const SpatialGrid g = sc.make_grid();
  switch (s.kind) {
    case InitialState::Kind::gaussian:
      for (int a = 0; a < dim; ++a) {
        if (!(s.width[a] > 0.0)) invalid(path + ".width", "must be positive");
      }
      if (!g.contains(s.center)) invalid(path + ".center", "must lie inside the grid");
      break;
    case InitialState::Kind::oscillator_eigenstate:
      if (dim != 1) invalid(path + ".kind", "oscillator eigenstates are one-dimensional");
      if (!(sc.hamiltonian.omega > 0.0)) invalid("hamiltonian.omega", "oscillator eigenstate needs omega > 0");
      if (sc.hamiltonian.metric_quadratic != 0.0) {
        invalid(path + ".kind", "oscillator eigenstate needs a constant metric");
      }
      if (s.level < 0 || s.level > 40) invalid(path + ".level", "must lie in [0, 40]");
      break;
    case InitialState::Kind::vortex:
      if (dim != 2) invalid(path + ".kind", "vortex states are two-dimensional");
      if (!(s.width[0] > 0.0)) invalid(path + ".width", "must be positive");
      if (!g.contains(s.center)) invalid(path + ".center", "must lie inside the grid");
      break;
    case InitialState::Kind::superposition:
      if (s.terms.empty()) invalid(path + ".terms", "expected a non-empty array");
      for (std::size_t k = 0; k < s.terms.size(); ++k) {
        validate_initial(s.terms[k], sc, path + ".terms[" + std::to_string(k) + "].state");
      }
      break;
  }
}

// Hermite functions by the stable three-term recurrence.
double hermite_function(int n, double xi) {
  double prev = 0.0;
  double cur = std::exp(-0.5 * xi * xi) / std::pow(std::numbers::pi, 0.25);
  for (int k = 0; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * xi * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

ComplexField build_state(const InitialState& s, const Scenario& sc, const SpatialGrid& g) {
  const double lambda = sc.stochastic.lambda_mag;
  const int dim = g.dim();
  ComplexField psi(g);
  switch (s.kind) {
    case InitialState::Kind::gaussian:
      for (std::size_t i = 0; i < g.size(); ++i) {
        const Point q = g.point(i);
        Complex e{0.0, 0.0};
        for (int a = 0; a < dim; ++a) {
          const double x = q[a] - s.center[a];
          e += Complex{-x * x / (4.0 * s.width[a] * s.width[a]), s.boost[a] * x / lambda};
        }
        psi[i] = std::exp(e);
      }
      break;
    case InitialState::Kind::oscillator_eigenstate: {
      const double scale = std::sqrt(sc.hamiltonian.mass * sc.hamiltonian.omega / lambda);
      for (std::size_t i = 0; i < g.size(); ++i) {
        psi[i] = hermite_function(s.level, scale * (g.point(i)[0] - sc.hamiltonian.center[0]));
      }
      WaveFunction guess{psi, 0.0, lambda};
      const DiscreteHamiltonian h = DiscreteHamiltonian::build(sc.spec(), g, sc.grid.boundary, lambda);
      const double shift = lambda * sc.hamiltonian.omega * (s.level + 0.5);
      psi = refine_eigenstate(h, guess, shift).psi;
      break;
    }
    case InitialState::Kind::vortex:
      for (std::size_t i = 0; i < g.size(); ++i) {
        const Point q = g.point(i);
        const double x = (q[0] - s.center[0]) / s.width[0];
        const double y = (q[1] - s.center[1]) / s.width[0];
        const Complex z = s.charge >= 0 ? Complex{x, y} : Complex{x, -y};
        psi[i] = std::pow(z, std::abs(s.charge)) * std::exp(-0.25 * (x * x + y * y));
      }
      break;
    case InitialState::Kind::superposition:
      for (std::size_t k = 0; k < s.terms.size(); ++k) {
        WaveFunction term{build_state(s.terms[k], sc, g), 0.0, lambda};
        term.normalize();
        const Complex c = std::polar(s.amplitudes[k], s.phases[k]);
        for (std::size_t i = 0; i < g.size(); ++i) psi[i] += c * term.psi[i];
      }
      break;
  }
  return psi;
}

const std::map<std::string, std::string>& preset_sources() {
  static const std::map<std::string, std::string> presets = {
      {"free_gaussian", R"({
        "name": "free_gaussian",
        "hamiltonian": {"mass": 1.0},
        "initial": {"kind": "gaussian", "center": [0.0], "width": [1.0]},
        "grid": {"lo": [-20.0], "hi": [20.0], "points": [2048]},
        "stochastic": {"lambda_mag": 1.0, "dt": 0.005},
        "t_final": 3.5, "snapshots": [0.0, 1.75, 3.5], "trajectories": 100000
      })"},
      {"boosted_gaussian", R"({
        "name": "boosted_gaussian",
        "hamiltonian": {"mass": 1.0},
        "initial": {"kind": "gaussian", "center": [-4.0], "width": [1.0], "boost": [2.0]},
        "grid": {"lo": [-20.0], "hi": [20.0], "points": [2048]},
        "stochastic": {"lambda_mag": 1.0, "dt": 0.005},
        "t_final": 2.0, "snapshots": [0.0, 1.0, 2.0], "trajectories": 100000
      })"},
      {"oscillator_n0", R"({
        "name": "oscillator_n0",
        "hamiltonian": {"mass": 1.0, "omega": 1.0},
        "initial": {"kind": "oscillator_eigenstate", "level": 0},
        "grid": {"lo": [-10.0], "hi": [10.0], "points": [1024]},
        "stochastic": {"lambda_mag": 1.0, "dt": 0.002},
        "t_final": 1.0, "snapshots": [0.0, 0.5, 1.0], "trajectories": 100000
      })"},
      {"oscillator_n1", R"({
        "name": "oscillator_n1",
        "hamiltonian": {"mass": 1.0, "omega": 1.0},
        "initial": {"kind": "oscillator_eigenstate", "level": 1},
        "grid": {"lo": [-10.0], "hi": [10.0], "points": [1024]},
        "stochastic": {"lambda_mag": 1.0, "dt": 0.002},
        "t_final": 1.0, "snapshots": [0.0, 0.5, 1.0], "trajectories": 100000
      })"},
      {"superposition_phase", R"({
        "name": "superposition_phase",
        "hamiltonian": {"mass": 1.0},
        "initial": {"kind": "superposition", "terms": [
          {"amplitude": 1.0, "phase": 0.0,
           "state": {"kind": "gaussian", "center": [-2.0], "width": [1.0]}},
          {"amplitude": 0.6, "phase": 1.5707963267948966,
           "state": {"kind": "gaussian", "center": [2.0], "width": [1.0]}}]},
        "grid": {"lo": [-20.0], "hi": [20.0], "points": [2048]},
        "stochastic": {"lambda_mag": 1.0, "dt": 0.005},
        "t_final": 0.5, "snapshots": [0.0, 0.5], "trajectories": 100000
      })"},
      {"two_free_particles", R"({
        "name": "two_free_particles",
        "hamiltonian": {"dim": 2, "mass": 1.0, "mass_y": 1.0},
        "initial": {"kind": "gaussian", "center": [-1.0, 1.0], "width": [1.0, 1.0]},
        "grid": {"lo": [-10.0, -10.0], "hi": [10.0, 10.0], "points": [128, 128]},
        "stochastic": {"lambda_mag": 1.0, "dt": 0.01},
        "t_final": 1.0, "snapshots": [0.0, 1.0], "trajectories": 20000,
        "factorization_samples": 100000
      })"},
      {"position_dependent_mass", R"({
        "name": "position_dependent_mass",
        "hamiltonian": {"mass": 1.0, "omega": 1.0, "metric_quadratic": 0.1},
        "initial": {"kind": "gaussian", "center": [1.0], "width": [0.7071067811865476]},
        "grid": {"lo": [-10.0], "hi": [10.0], "points": [1024]},
        "stochastic": {"lambda_mag": 1.0, "dt": 0.002},
        "t_final": 1.0, "snapshots": [0.0, 0.5, 1.0], "trajectories": 100000
      })"},
      {"vortex_2d", R"({
        "name": "vortex_2d",
        "hamiltonian": {"dim": 2, "mass": 1.0, "mass_y": 1.0},
        "initial": {"kind": "vortex", "center": [0.0, 0.0], "width": 1.0, "charge": 1},
        "grid": {"lo": [-8.0, -8.0], "hi": [8.0, 8.0], "points": [128, 128]},
        "stochastic": {"lambda_mag": 1.0, "dt": 0.01},
        "t_final": 0.5, "snapshots": [0.0, 0.5], "trajectories": 20000
      })"},
  };
  return presets;
}

bool is_multiple(double t, double dt) {
  const double k = std::round(t / dt);
  return std::abs(k * dt - t) <= 1e-9 * std::max(1.0, t);
}

}  // namespace

HamiltonianSpec Scenario::spec() const {
  const HamiltonianParams& h = hamiltonian;
  HamiltonianSpec s;
  s.dim = h.dim;
  s.inverse_mass = {1.0 / h.mass, 1.0 / (h.dim == 2 ? h.mass_y : h.mass)};
  if (h.dim == 1 && h.metric_quadratic != 0.0) {
    const double b = h.metric_quadratic;
    const double m = h.mass;
    s.position_metric = [b, m](double q) { return (1.0 + b * q * q) / m; };
  }
  if (h.omega != 0.0 || h.offset != 0.0) {
    const double w2 = h.omega * h.omega;
    const std::array<double, 2> k{h.mass * w2, (h.dim == 2 ? h.mass_y : h.mass) * w2};
    const Point c = h.center;
    const int dim = h.dim;
    const double offset = h.offset;
    s.potential = [k, c, dim, offset](const Point& q) {
      double v = offset;
      for (int a = 0; a < dim; ++a) v += 0.5 * k[a] * (q[a] - c[a]) * (q[a] - c[a]);
      return v;
    };
  }
  if (h.vector_constant != Point{0.0, 0.0} || h.magnetic_field != 0.0) {
    const Point a0 = h.vector_constant;
    const double bz = h.magnetic_field;
    s.vector_potential = [a0, bz](const Point& q) {
      return Point{a0[0] - 0.5 * bz * q[1], a0[1] + 0.5 * bz * q[0]};
    };
  }
  return s;
}

SpatialGrid Scenario::make_grid() const {
  if (hamiltonian.dim == 1) return SpatialGrid::line(grid.lo[0], grid.hi[0], grid.points[0]);
  return SpatialGrid::plane({grid.lo[0], grid.hi[0], grid.points[0]}, {grid.lo[1], grid.hi[1], grid.points[1]});
}

WaveFunction Scenario::initial_wavefunction() const {
  const SpatialGrid g = make_grid();
  WaveFunction psi{build_state(initial, *this, g), 0.0, stochastic.lambda_mag};
  psi.normalize();
  return psi;
}

EnsembleConfig Scenario::ensemble_config() const {
  EnsembleConfig c;
  c.spec = spec();
  c.boundary = grid.boundary;
  c.params = stochastic;
  c.t_final = t_final;
  c.snapshot_times = snapshots.empty() ? std::vector<double>{0.0, t_final} : snapshots;
  c.trajectories = trajectories;
  c.initial_sign = initial_sign;
  return c;
}

void Scenario::validate() const {
  if (name.empty()) invalid("name", "must not be empty");
  const HamiltonianParams& h = hamiltonian;
  if (h.dim != 1 && h.dim != 2) invalid("hamiltonian.dim", "must be 1 or 2");
  if (!(h.mass > 0.0)) invalid("hamiltonian.mass", "must be positive");
  if (!(h.mass_y > 0.0)) invalid("hamiltonian.mass_y", "must be positive");
  if (h.omega < 0.0) invalid("hamiltonian.omega", "must be nonnegative");
  if (h.metric_quadratic < 0.0) invalid("hamiltonian.metric_quadratic", "must be nonnegative");
  if (h.dim == 2 && h.metric_quadratic != 0.0) {
    invalid("hamiltonian.metric_quadratic", "position-dependent metric is one-dimensional only");
  }
  if (h.dim == 1 && h.magnetic_field != 0.0) invalid("hamiltonian.magnetic_field", "needs a 2D scenario");

  const auto d = static_cast<std::size_t>(h.dim);
  if (grid.lo.size() != d) invalid("grid.lo", "expected one value per axis");
  if (grid.hi.size() != d) invalid("grid.hi", "expected one value per axis");
  if (grid.points.size() != d) invalid("grid.points", "expected one value per axis");
  for (std::size_t a = 0; a < d; ++a) {
    if (!(grid.lo[a] < grid.hi[a])) invalid("grid.hi", "must exceed grid.lo");
    if (grid.points[a] < 8) invalid("grid.points", "need at least 8 points per axis");
    if (grid.points[a] > 1u << 16) invalid("grid.points", "at most 65536 points per axis");
  }
  if (h.dim == 2 && grid.boundary == Boundary::periodic) {
    invalid("grid.boundary", "periodic boundaries are supported in 1D only");
  }

  try {
    stochastic.validate();
  } catch (const ValidationError& e) {
    invalid(e.field(), std::string(e.what()).substr(e.field().size() + 2));
  }
  if (!(t_final >= 0.0)) invalid("t_final", "must be nonnegative");
  if (!is_multiple(t_final, stochastic.dt_step)) invalid("t_final", "must be a multiple of stochastic.dt");
  for (double t : snapshots) {
    if (!(t >= 0.0 && t <= t_final + 1e-12)) invalid("snapshots", "times must lie in [0, t_final]");
    if (!is_multiple(t, stochastic.dt_step)) invalid("snapshots", "times must be multiples of stochastic.dt");
  }
  if (trajectories > 10'000'000) invalid("trajectories", "at most 1e7");
  if (initial_sign < -1 || initial_sign > 1) invalid("initial_sign", "must be -1, 0 or 1");
  if (factorization_samples != 0) {
    if (factorization_samples < 1000) invalid("factorization_samples", "need at least 1000 samples");
    if (h.dim != 2 || h.magnetic_field != 0.0) {
      invalid("factorization_samples", "needs a 2D scenario without coupling terms");
    }
  }
  validate_initial(initial, *this, "initial");
}

Scenario scenario_from_json(const json& j) {
  ObjectReader root(j, "");
  Scenario s;
  s.name = root.text("name", "custom");

  if (const json* hj = root.get("hamiltonian")) {
    ObjectReader r(*hj, "hamiltonian");
    HamiltonianParams& h = s.hamiltonian;
    h.dim = static_cast<int>(r.integer("dim", 1));
    if (h.dim != 1 && h.dim != 2) invalid("hamiltonian.dim", "must be 1 or 2");
    h.mass = r.number("mass", 1.0);
    h.mass_y = r.number("mass_y", h.mass);
    h.omega = r.number("omega", 0.0);
    h.center = r.point("center", h.dim, h.center);
    h.offset = r.number("offset", 0.0);
    h.metric_quadratic = r.number("metric_quadratic", 0.0);
    h.vector_constant = r.point("vector_potential", h.dim, h.vector_constant);
    h.magnetic_field = r.number("magnetic_field", 0.0);
    r.finish();
  }
  const int dim = s.hamiltonian.dim;

  if (const json* gj = root.get("grid")) {
    ObjectReader r(*gj, "grid");
    s.grid.lo = r.numbers("lo", std::vector<double>(static_cast<std::size_t>(dim), -20.0));
    s.grid.hi = r.numbers("hi", std::vector<double>(static_cast<std::size_t>(dim), 20.0));
    const std::vector<double> pts =
        r.numbers("points", std::vector<double>(static_cast<std::size_t>(dim), dim == 1 ? 2048.0 : 128.0));
    s.grid.points.clear();
    for (double p : pts) {
      if (!(p >= 0.0) || p != std::floor(p)) invalid("grid.points", "expected nonnegative integers");
      s.grid.points.push_back(static_cast<std::size_t>(p));
    }
    try {
      s.grid.boundary = boundary_from_string(r.text("boundary", "dirichlet"));
    } catch (const ConfigurationError&) {
      invalid("grid.boundary", "expected 'dirichlet' or 'periodic'");
    }
    r.finish();
  } else {
    s.grid.lo.assign(static_cast<std::size_t>(dim), -20.0);
    s.grid.hi.assign(static_cast<std::size_t>(dim), 20.0);
    s.grid.points.assign(static_cast<std::size_t>(dim), dim == 1 ? 2048 : 128);
  }

  if (const json* ij = root.get("initial")) s.initial = read_initial(*ij, "initial", dim);

  if (const json* sj = root.get("stochastic")) {
    ObjectReader r(*sj, "stochastic");
    s.stochastic.lambda_mag = r.number("lambda_mag", 1.0);
    s.stochastic.dt_step = r.number("dt", 0.005);
    s.stochastic.flip_prob = r.number("flip_prob", 0.5);
    r.finish();
  } else {
    s.stochastic.dt_step = 0.005;
  }
  s.stochastic.seed = root.unsigned_integer("seed", 0);
  s.t_final = root.number("t_final", 1.0);
  s.snapshots = root.numbers("snapshots", {0.0, s.t_final});
  s.trajectories = static_cast<std::size_t>(root.unsigned_integer("trajectories", 10000));
  s.initial_sign = static_cast<int>(root.integer("initial_sign", 0));
  s.factorization_samples = static_cast<std::size_t>(root.unsigned_integer("factorization_samples", 0));
  root.finish();
  s.validate();
  return s;
}

Scenario parse_config(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << source << ":" << line << ":" << col << ": parse error: " << e.what();
    throw ConfigurationError("cli", msg.str());
  }
  return scenario_from_json(j);
}

Scenario load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cli", "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

json dump(const Scenario& s) {
  const int dim = s.hamiltonian.dim;
  const HamiltonianParams& h = s.hamiltonian;
  json hj = {{"dim", h.dim},
             {"mass", h.mass},
             {"mass_y", h.mass_y},
             {"omega", h.omega},
             {"center", point_json(h.center, dim)},
             {"offset", h.offset},
             {"metric_quadratic", h.metric_quadratic},
             {"vector_potential", point_json(h.vector_constant, dim)},
             {"magnetic_field", h.magnetic_field}};
  json gj = {{"lo", s.grid.lo},
             {"hi", s.grid.hi},
             {"points", s.grid.points},
             {"boundary", s.grid.boundary == Boundary::periodic ? "periodic" : "dirichlet"}};
  json sj = {{"lambda_mag", s.stochastic.lambda_mag},
             {"dt", s.stochastic.dt_step},
             {"flip_prob", s.stochastic.flip_prob}};
  return {{"name", s.name},
          {"hamiltonian", hj},
          {"initial", initial_json(s.initial, dim)},
          {"grid", gj},
          {"stochastic", sj},
          {"seed", s.stochastic.seed},
          {"t_final", s.t_final},
          {"snapshots", s.snapshots},
          {"trajectories", s.trajectories},
          {"initial_sign", s.initial_sign},
          {"factorization_samples", s.factorization_samples}};
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, src] : preset_sources()) names.push_back(name);
  return names;
}

Scenario preset(const std::string& name) {
  auto it = preset_sources().find(name);
  if (it == preset_sources().end()) throw ConfigurationError("cli", "unknown scenario '" + name + "'");
  return parse_config(it->second, "preset:" + name);
}

Scenario with_value(const Scenario& s, const std::string& key, double value) {
  static const std::map<std::string, std::string> aliases = {
      {"lambda_mag", "stochastic.lambda_mag"}, {"lambda", "stochastic.lambda_mag"}, {"dt", "stochastic.dt"},
      {"flip_prob", "stochastic.flip_prob"}};
  const auto alias = aliases.find(key);
  const std::string path = alias == aliases.end() ? key : alias->second;
  json j = dump(s);
  json* node = &j;
  std::string rest = path;
  while (true) {
    const auto dot = rest.find('.');
    const std::string part = rest.substr(0, dot);
    if (!node->is_object() || !node->contains(part)) invalid(path, "unknown sweep key");
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    rest = rest.substr(dot + 1);
  }
  if (node->is_number_integer()) {
    if (value != std::floor(value) || value < 0.0) invalid(path, "expected a nonnegative integer");
    *node = static_cast<std::uint64_t>(value);
  } else if (node->is_number()) {
    *node = value;
  } else if (node->is_array() && node->size() == 1 && (*node)[0].is_number()) {
    (*node)[0] = value;
  } else {
    invalid(path, "sweep key must name a number");
  }
  return scenario_from_json(j);
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace stochaction
