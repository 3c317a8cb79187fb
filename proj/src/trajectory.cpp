#include "stochaction/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <thread>

#include "stochaction/differential.hpp"
#include "stochaction/distribution.hpp"

namespace stochaction {

AdvectionFields AdvectionFields::from(const WaveFunction& psi, const HydroFields& h, const HamiltonianSpec& spec) {
  require_same_grid(psi.psi.grid(), h.grid(), "trajectory_engine");
  AdvectionFields f;
  f.grid = h.grid();
  f.boundary = h.boundary;
  f.lambda_mag = h.lambda_mag;
  f.rho_eps = h.rho_eps;
  f.drift = bohmian_velocity(h, spec);
  for (int a = 0; a < h.dim(); ++a) {
    RealField g(f.grid), va(f.grid), u(f.grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const Point q = f.grid.point(i);
      g[i] = spec.metric(q, a);
      va[i] = spec.vector_potential_at(q, a);
      u[i] = g[i] * 0.5 * h.lambda_mag * h.log_rho_grad[a][i];
    }
    f.metric.push_back(std::move(g));
    f.vector_potential.push_back(std::move(va));
    f.osmotic.push_back(std::move(u));
  }
  f.s_grad = h.s_grad;
  f.log_rho_grad = h.log_rho_grad;
  f.node_mask = h.node_mask;
  return f;
}

AdvectionFields::Local AdvectionFields::at(const Point& q) const {
  const InterpolationStencil st = locate(grid, boundary, q);
  Local out;
  for (int a = 0; a < grid.dim(); ++a) {
    const auto ua = static_cast<std::size_t>(a);
    out.s_grad[ua] = interpolate(s_grad[ua], st);
    out.log_rho_grad[ua] = interpolate(log_rho_grad[ua], st);
    out.drift[ua] = interpolate(drift[ua], st);
    out.osmotic[ua] = interpolate(osmotic[ua], st);
  }
  return out;
}

std::vector<Point> sample_initial(const RealField& rho, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ConfigurationError("trajectory_engine", "sample_initial needs n >= 1");
  const SpatialGrid& g = rho.grid();
  std::vector<double> cdf(g.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(rho[i] >= 0.0) || !std::isfinite(rho[i])) {
      throw DomainError("trajectory_engine", "density must be finite and nonnegative");
    }
    acc += rho[i];
    cdf[i] = acc;
  }
  if (!(acc > 0.0)) throw DomainError("trajectory_engine", "density has no mass");

  std::vector<Point> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    RngStream rng(seed, k, StreamPurpose::initial_position);
    const double target = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    // Never land on a zero-mass cell through rounding at the top end.
    if (it == cdf.end()) it = std::prev(it);
    while (it != cdf.begin() && rho[static_cast<std::size_t>(it - cdf.begin())] == 0.0) --it;
    const std::size_t cell = static_cast<std::size_t>(it - cdf.begin());
    Point q = g.point(cell);
    for (int a = 0; a < g.dim(); ++a) q[static_cast<std::size_t>(a)] += (rng.uniform() - 0.5) * g.spacing(a);
    out[k] = q;
  }
  return out;
}

namespace {

// Wraps periodic coordinates and terminates particles outside a Dirichlet box.
void settle(ParticleState& s, const SpatialGrid& grid, Boundary boundary) {
  if (boundary == Boundary::periodic) {
    for (int a = 0; a < grid.dim(); ++a) {
      const Axis& ax = grid.axis(a);
      double& x = s.position[static_cast<std::size_t>(a)];
      x = ax.lo + std::fmod(x - ax.lo, ax.length());
      if (x < ax.lo) x += ax.length();
    }
  } else if (!grid.contains(s.position)) {
    s.terminated = true;
  }
}

bool step_with(ParticleState& s, const AdvectionFields& f, double osmotic_sign, double dt) {
  const bool node = f.node_mask[containing_cell(f.grid, s.position)] != 0;
  const AdvectionFields::Local v = f.at(s.position);
  Point next = s.position;
  for (int a = 0; a < f.grid.dim(); ++a) {
    const auto ua = static_cast<std::size_t>(a);
    next[ua] += (v.drift[ua] + osmotic_sign * v.osmotic[ua]) * dt;
  }
  const Point last = s.position;
  s.position = next;
  settle(s, f.grid, f.boundary);
  if (s.terminated) s.position = last;
  return node;
}

template <class F>
std::size_t parallel_blocks(std::size_t n, unsigned workers, F&& body) {
  if (workers <= 1 || n < 2048) return body(std::size_t{0}, n);
  const std::size_t w = std::min<std::size_t>(workers, n);
  std::vector<std::size_t> partial(w, 0);
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::size_t b = 0; b < w; ++b) {
    const std::size_t lo = n * b / w;
    const std::size_t hi = n * (b + 1) / w;
    pool.emplace_back([&, b, lo, hi] { partial[b] = body(lo, hi); });
  }
  for (auto& t : pool) t.join();
  return std::accumulate(partial.begin(), partial.end(), std::size_t{0});
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

bool advance(ParticleState& state, const AdvectionFields& fields, double flip_prob, RngStream& rng, double dt) {
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) throw ConfigurationError("trajectory_engine", "flip_prob outside [0, 1]");
  if (!(dt > 0.0)) throw DomainError("trajectory_engine", "time step must be positive");
  const double u = rng.uniform();
  if (state.terminated) return false;
  if (u < flip_prob) state.sign = -state.sign;
  return step_with(state, fields, static_cast<double>(state.sign), dt);
}

bool advance_bohmian(ParticleState& state, const AdvectionFields& fields, double dt) {
  if (state.terminated) return false;
  return step_with(state, fields, 0.0, dt);
}

std::size_t EnsembleSnapshot::alive_count() const {
  return static_cast<std::size_t>(std::count(alive.begin(), alive.end(), 1));
}

double EnsembleResult::terminated_fraction() const {
  return trajectories ? static_cast<double>(terminated) / static_cast<double>(trajectories) : 0.0;
}

ReferencePath classical_path(const HamiltonianSpec& spec, const SpatialGrid& domain, const Point& q0,
                             const Point& p0, double t_final, double dt) {
  const std::size_t steps = steps_for(t_final, dt);
  const int dim = spec.dim;
  struct State {
    Point q, p;
  };
  auto rhs = [&](const State& s) {
    State d{};
    d.q = spec.velocity(s.q, s.p);
    for (int a = 0; a < dim; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const double eps = 1e-5 * std::max(1.0, std::abs(s.q[ua]));
      Point hi = s.q;
      Point lo = s.q;
      hi[ua] += eps;
      lo[ua] -= eps;
      d.p[ua] = -(spec.energy(hi, s.p) - spec.energy(lo, s.p)) / (2.0 * eps);
    }
    return d;
  };
  auto axpy = [&](const State& s, const State& d, double h) {
    State r = s;
    for (std::size_t a = 0; a < 2; ++a) {
      r.q[a] += h * d.q[a];
      r.p[a] += h * d.p[a];
    }
    return r;
  };

  ReferencePath path;
  State s{q0, p0};
  path.times.push_back(0.0);
  path.positions.push_back(s.q);
  for (std::size_t k = 1; k <= steps; ++k) {
    if (!path.terminated) {
      const State k1 = rhs(s);
      const State k2 = rhs(axpy(s, k1, 0.5 * dt));
      const State k3 = rhs(axpy(s, k2, 0.5 * dt));
      const State k4 = rhs(axpy(s, k3, dt));
      State next = s;
      for (std::size_t a = 0; a < 2; ++a) {
        next.q[a] += dt / 6.0 * (k1.q[a] + 2.0 * k2.q[a] + 2.0 * k3.q[a] + k4.q[a]);
        next.p[a] += dt / 6.0 * (k1.p[a] + 2.0 * k2.p[a] + 2.0 * k3.p[a] + k4.p[a]);
      }
      if (domain.contains(next.q)) {
        s = next;
      } else {
        path.terminated = true;
      }
    }
    path.times.push_back(static_cast<double>(k) * dt);
    path.positions.push_back(s.q);
  }
  return path;
}

EnsembleResult run_ensemble(const EnsembleConfig& config, const WaveFunction& initial) {
  config.params.validate();
  config.spec.validate_on(initial.psi.grid());
  const double dt = config.params.dt_step;
  const std::size_t total_steps = steps_for(config.t_final, dt);
  std::vector<std::size_t> snapshot_steps;
  for (double t : config.snapshot_times) {
    if (t > config.t_final + 1e-12) throw ConfigurationError("trajectory_engine", "snapshot time beyond t_final");
    snapshot_steps.push_back(steps_for(t, dt));
  }
  if (config.initial_sign != 0 && config.initial_sign != 1 && config.initial_sign != -1) {
    throw ConfigurationError("trajectory_engine", "initial_sign must be 0, +1 or -1");
  }

  const SpatialGrid& grid = initial.psi.grid();
  const std::size_t n = config.trajectories;
  const unsigned workers = resolve_workers(config.workers);
  const std::uint64_t seed = config.params.seed;

  EnsembleResult result;
  result.seed = seed;
  result.trajectories = n;
  result.dt = dt;
  result.lambda_mag = config.params.lambda_mag;
  result.flip_prob = config.params.flip_prob;
  result.dim = grid.dim();
  result.snapshots.resize(snapshot_steps.size());

  WaveFunction psi = initial;
  psi.lambda_mag = config.params.lambda_mag;
  const DiscreteHamiltonian hamiltonian =
      DiscreteHamiltonian::build(config.spec, grid, config.boundary, config.params.lambda_mag);
  std::optional<CrankNicolson> propagator;
  if (total_steps > 0) propagator.emplace(hamiltonian, dt);

  std::vector<ParticleState> particles(n);
  std::vector<ParticleState> bohmian;
  std::vector<RngStream> flips(n);
  std::vector<ReferencePath> classical;
  if (n > 0) {
    HydroFields h0 = decompose(psi, config.boundary, config.rho_eps);
    const std::vector<Point> start = sample_initial(h0.rho, n, seed);
    for (std::size_t i = 0; i < n; ++i) {
      flips[i] = RngStream(seed, i, StreamPurpose::sign_flip);
      particles[i].position = start[i];
      particles[i].sign = config.initial_sign != 0 ? config.initial_sign : (flips[i].uniform() < 0.5 ? -1 : 1);
    }
    if (config.track_bohmian) bohmian = particles;
    if (config.track_classical) {
      classical.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const InterpolationStencil st = locate(grid, config.boundary, start[i]);
        Point p0{};
        for (int a = 0; a < grid.dim(); ++a) p0[a] = interpolate(h0.s_grad[a], st);
        classical[i] = classical_path(config.spec, grid, start[i], p0, config.t_final, dt);
      }
    }
  }

  std::size_t node_hits = 0;
  for (std::size_t k = 0; k <= total_steps; ++k) {
    HydroFields hydro = decompose(psi, config.boundary, config.rho_eps);
    const AdvectionFields fields = AdvectionFields::from(psi, hydro, config.spec);
    const bool last = k == total_steps;

    // Sign flips for this step happen before recording so that a snapshot
    // holds the branch that drives the next move.
    const auto flip_block = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const double u = flips[i].uniform();
        if (!particles[i].terminated && u < config.params.flip_prob) particles[i].sign = -particles[i].sign;
      }
      return std::size_t{0};
    };
    parallel_blocks(n, workers, flip_block);

    for (std::size_t s = 0; s < snapshot_steps.size(); ++s) {
      if (snapshot_steps[s] != k) continue;
      EnsembleSnapshot& snap = result.snapshots[s];
      snap.time = initial.time + static_cast<double>(k) * dt;
      snap.state = psi;
      snap.state.time = snap.time;
      snap.hydro = hydro;
      snap.positions.resize(n);
      snap.momenta.resize(n);
      snap.osmotic_momenta.resize(n);
      snap.signs.resize(n);
      snap.alive.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const ParticleState& p = particles[i];
        snap.positions[i] = p.position;
        snap.signs[i] = static_cast<signed char>(p.sign);
        snap.alive[i] = p.terminated ? 0 : 1;
        // Momenta are read at grid resolution, the resolution of the
        // stencils on the quantum side.
        const std::size_t cell = containing_cell(grid, p.position);
        for (int a = 0; a < grid.dim(); ++a) {
          const double u = p.sign * 0.5 * hydro.lambda_mag * hydro.log_rho_grad[a][cell];
          snap.osmotic_momenta[i][a] = u;
          snap.momenta[i][a] = hydro.s_grad[a][cell] + u;
        }
      }
      if (config.track_bohmian) {
        snap.bohmian_positions.resize(n);
        snap.bohmian_alive.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          snap.bohmian_positions[i] = bohmian[i].position;
          snap.bohmian_alive[i] = bohmian[i].terminated ? 0 : 1;
        }
      }
      if (config.track_classical) {
        snap.classical_positions.resize(n);
        for (std::size_t i = 0; i < n; ++i) snap.classical_positions[i] = classical[i].positions[k];
      }
    }
    if (last) break;

    const auto move_block = [&](std::size_t lo, std::size_t hi) {
      std::size_t hits = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        if (!particles[i].terminated) {
          hits += step_with(particles[i], fields, static_cast<double>(particles[i].sign), dt) ? 1 : 0;
        }
        if (config.track_bohmian) advance_bohmian(bohmian[i], fields, dt);
      }
      return hits;
    };
    node_hits += parallel_blocks(n, workers, move_block);
    propagator->step_in_place(psi);
  }

  result.node_encounters = node_hits;
  result.terminated = static_cast<std::size_t>(
      std::count_if(particles.begin(), particles.end(), [](const ParticleState& p) { return p.terminated; }));
  if (result.terminated_fraction() > 0.1) {
    result.warning = "domain too small: " + std::to_string(result.terminated) + " of " + std::to_string(n) +
                     " trajectories left the grid";
  }
  return result;
}

ReferencePath bohmian_reference(const EnsembleConfig& config, const WaveFunction& initial, const Point& q0) {
  config.params.validate();
  const double dt = config.params.dt_step;
  const std::size_t steps = steps_for(config.t_final, dt);
  const SpatialGrid& grid = initial.psi.grid();
  WaveFunction psi = initial;
  psi.lambda_mag = config.params.lambda_mag;
  const DiscreteHamiltonian hamiltonian =
      DiscreteHamiltonian::build(config.spec, grid, config.boundary, config.params.lambda_mag);
  std::optional<CrankNicolson> propagator;
  if (steps > 0) propagator.emplace(hamiltonian, dt);

  ReferencePath path;
  ParticleState p;
  p.position = q0;
  if (!grid.contains(q0)) throw DomainError("trajectory_engine", "extrapolation: q0 lies outside the grid");
  for (std::size_t k = 0; k <= steps; ++k) {
    path.times.push_back(initial.time + static_cast<double>(k) * dt);
    path.positions.push_back(p.position);
    if (k == steps) break;
    const HydroFields hydro = decompose(psi, config.boundary, config.rho_eps);
    const AdvectionFields fields = AdvectionFields::from(psi, hydro, config.spec);
    if (advance_bohmian(p, fields, dt)) ++path.node_encounters;
    propagator->step_in_place(psi);
  }
  path.terminated = p.terminated;
  return path;
}

void write_positions_csv(std::ostream& os, const EnsembleResult& result) {
  os << std::setprecision(17);
  os << (result.dim == 2 ? "snapshot,time,index,qx,qy,sign,alive\n" : "snapshot,time,index,q,sign,alive\n");
  for (std::size_t s = 0; s < result.snapshots.size(); ++s) {
    const EnsembleSnapshot& snap = result.snapshots[s];
    for (std::size_t i = 0; i < snap.positions.size(); ++i) {
      os << s << ',' << snap.time << ',' << i << ',' << snap.positions[i][0] << ',';
      if (result.dim == 2) os << snap.positions[i][1] << ',';
      os << static_cast<int>(snap.signs[i]) << ',' << static_cast<int>(snap.alive[i]) << '\n';
    }
  }
}

namespace {

// Marginal density along one axis, as a 1D field.
RealField marginal(const RealField& rho, int axis) {
  const SpatialGrid& g = rho.grid();
  if (g.dim() == 1) return rho;
  const Axis& ax = g.axis(axis);
  const SpatialGrid line = SpatialGrid::line(ax.lo, ax.hi, ax.points);
  RealField out(line);
  const double other = g.spacing(1 - axis);
  for (std::size_t i = 0; i < g.size(); ++i) out[g.coordinate_index(i, axis)] += rho[i] * other;
  return out;
}

}  // namespace

void write_histogram_csv(std::ostream& os, const EnsembleResult& result, std::size_t bins) {
  os << std::setprecision(17);
  os << "snapshot,time,axis,bin_lo,bin_hi,ensemble,quantum\n";
  for (std::size_t s = 0; s < result.snapshots.size(); ++s) {
    const EnsembleSnapshot& snap = result.snapshots[s];
    const SpatialGrid& g = snap.state.psi.grid();
    for (int a = 0; a < g.dim(); ++a) {
      Histogram h(g.axis(a).lo, g.axis(a).hi, bins);
      for (std::size_t i = 0; i < snap.positions.size(); ++i) {
        if (snap.alive[i]) h.add(snap.positions[i][a]);
      }
      const std::vector<double> quantum = bin_probabilities(marginal(snap.hydro.rho, a), h);
      const double n = result.trajectories ? static_cast<double>(result.trajectories) : 1.0;
      for (std::size_t b = 0; b < bins; ++b) {
        os << s << ',' << snap.time << ',' << a << ',' << h.edge(b) << ',' << h.edge(b + 1) << ','
           << h.counts()[b] / n << ',' << quantum[b + 1] << '\n';
      }
    }
  }
}

nlohmann::json summary_json(const EnsembleResult& result) {
  nlohmann::json snaps = nlohmann::json::array();
  for (const EnsembleSnapshot& s : result.snapshots) {
    snaps.push_back({{"time", s.time},
                     {"alive", s.alive_count()},
                     {"norm", s.state.norm()},
                     {"masked_cells", s.hydro.masked_count()}});
  }
  nlohmann::json j = {{"seed", result.seed},
                      {"trajectories", result.trajectories},
                      {"dt", result.dt},
                      {"lambda_mag", result.lambda_mag},
                      {"flip_prob", result.flip_prob},
                      {"terminated", result.terminated},
                      {"terminated_fraction", result.terminated_fraction()},
                      {"node_encounters", result.node_encounters},
                      {"snapshots", snaps}};
  j["warning"] = result.warning ? nlohmann::json(*result.warning) : nlohmann::json(nullptr);
  return j;
}

double equivariance_tv(const EnsembleSnapshot& snapshot, double lo, double hi, std::size_t bins) {
  const SpatialGrid& g = snapshot.state.psi.grid();
  if (g.dim() != 1) throw ConfigurationError("trajectory_engine", "equivariance TV is computed in 1D");
  Histogram h(lo, hi, bins);
  for (std::size_t i = 0; i < snapshot.positions.size(); ++i) {
    if (snapshot.alive[i]) h.add(snapshot.positions[i][0]);
  }
  if (h.total() == 0.0) throw ConfigurationError("trajectory_engine", "empty ensemble");
  return total_variation(h.probabilities_with_tails(), bin_probabilities(snapshot.hydro.rho, h));
}

}  // namespace stochaction
