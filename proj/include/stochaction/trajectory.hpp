#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "stochaction/action_model.hpp"
#include "stochaction/madelung.hpp"
#include "stochaction/quantum_solver.hpp"

namespace stochaction {

struct ParticleState {
  Point position{};
  int sign = 1;
  bool terminated = false;
};

// Velocity fields of one solver step: v = drift + sign * osmotic, with
// drift = g (dS - a) and osmotic = g (lambda/2) d rho / rho. Evaluation off
// the grid is linear interpolation of the cell values.
struct AdvectionFields {
  SpatialGrid grid;
  Boundary boundary = Boundary::dirichlet_zero;
  double lambda_mag = 1.0;
  double rho_eps = 0.0;
  std::vector<RealField> metric;
  std::vector<RealField> vector_potential;
  VelocityField drift;
  VelocityField osmotic;
  std::vector<RealField> s_grad;
  std::vector<RealField> log_rho_grad;
  MaskField node_mask;

  static AdvectionFields from(const WaveFunction& psi, const HydroFields& h, const HamiltonianSpec& spec);

  struct Local {
    Point s_grad{};
    Point log_rho_grad{};
    Point drift{};
    Point osmotic{};
  };
  Local at(const Point& q) const;
};

// Inverse-CDF sampling of a grid density with uniform jitter inside the
// chosen cell. Particle i draws from stream (seed, i, initial_position).
std::vector<Point> sample_initial(const RealField& rho, std::size_t n, std::uint64_t seed);

// One explicit Euler step of the sign-switching velocity. The sign flips
// with probability flip_prob (one uniform draw per call), then
// q += v_sign(q) dt. A particle that leaves the grid is terminated and
// keeps its last position. Returns true if q sat in a node cell (its
// velocity then comes from the nearest regular cell).
bool advance(ParticleState& state, const AdvectionFields& fields, double flip_prob, RngStream& rng, double dt);

// Drift-only step (Bohmian). Same termination and node conventions.
bool advance_bohmian(ParticleState& state, const AdvectionFields& fields, double dt);

struct EnsembleConfig {
  HamiltonianSpec spec;
  Boundary boundary = Boundary::dirichlet_zero;
  StochasticParams params;  // params.dt_step is both the solver and particle step
  double t_final = 0.0;
  std::vector<double> snapshot_times;
  std::size_t trajectories = 0;
  int initial_sign = 0;  // 0: random per trajectory; +1 / -1: fixed
  bool track_bohmian = false;
  bool track_classical = false;
  unsigned workers = 0;  // 0: hardware concurrency
  std::optional<double> rho_eps;
};

struct EnsembleSnapshot {
  double time = 0.0;
  WaveFunction state;
  HydroFields hydro;
  std::vector<Point> positions;
  // p = dS + sign (lambda/2) d rho / rho at the particle, and its second term.
  std::vector<Point> momenta;
  std::vector<Point> osmotic_momenta;
  std::vector<signed char> signs;
  std::vector<unsigned char> alive;
  std::vector<Point> bohmian_positions;
  std::vector<unsigned char> bohmian_alive;
  std::vector<Point> classical_positions;

  std::size_t alive_count() const;
};

struct EnsembleResult {
  std::uint64_t seed = 0;
  std::size_t trajectories = 0;
  double dt = 0.0;
  double lambda_mag = 1.0;
  double flip_prob = 0.5;
  int dim = 1;
  std::vector<EnsembleSnapshot> snapshots;
  std::size_t terminated = 0;
  std::size_t node_encounters = 0;
  std::optional<std::string> warning;

  double terminated_fraction() const;
};

// Evolves the wave function once and advances every trajectory against the
// frozen per-step fields. Deterministic for a given seed whatever the
// worker count. Snapshot times must be multiples of dt in [0, t_final].
EnsembleResult run_ensemble(const EnsembleConfig& config, const WaveFunction& initial);

struct ReferencePath {
  std::vector<double> times;
  std::vector<Point> positions;
  std::size_t node_encounters = 0;
  bool terminated = false;
};

// Noise-free path along v_B from q0, sampled every step.
ReferencePath bohmian_reference(const EnsembleConfig& config, const WaveFunction& initial, const Point& q0);

// Hamilton's equations from (q0, p0) by RK4, sampled every step. Forces are
// central differences of V and the kinetic term in q.
ReferencePath classical_path(const HamiltonianSpec& spec, const SpatialGrid& domain, const Point& q0,
                             const Point& p0, double t_final, double dt);

// Positions CSV: snapshot,time,index,q (or qx,qy),sign,alive.
void write_positions_csv(std::ostream& os, const EnsembleResult& result);
// Histogram CSV per snapshot against |psi|^2 (1D: bins over the grid extent).
void write_histogram_csv(std::ostream& os, const EnsembleResult& result, std::size_t bins);
nlohmann::json summary_json(const EnsembleResult& result);

// TV distance between the 1D ensemble histogram and |psi|^2 on `bins`
// equal bins spanning [lo, hi]; mass outside [lo, hi] forms two tail bins.
double equivariance_tv(const EnsembleSnapshot& snapshot, double lo, double hi, std::size_t bins);

}  // namespace stochaction
