#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "stochaction/action_model.hpp"
#include "stochaction/quantum_solver.hpp"
#include "stochaction/trajectory.hpp"

namespace stochaction {

struct HamiltonianParams {
  int dim = 1;
  double mass = 1.0;
  double mass_y = 1.0;
  double omega = 0.0;        // harmonic frequency, 0 for none
  Point center{0.0, 0.0};    // harmonic centre
  double offset = 0.0;       // constant added to V
  double metric_quadratic = 0.0;  // 1D: B(q) = (1 + b q^2) / m
  Point vector_constant{0.0, 0.0};
  double magnetic_field = 0.0;    // 2D symmetric gauge a = B/2 (-y, x)
};

struct InitialState {
  enum class Kind { gaussian, oscillator_eigenstate, superposition, vortex };

  Kind kind = Kind::gaussian;
  // gaussian
  Point center{0.0, 0.0};
  Point width{1.0, 1.0};
  Point boost{0.0, 0.0};
  // oscillator_eigenstate
  int level = 0;
  // vortex (uses center and width[0])
  int charge = 1;
  // superposition
  std::vector<InitialState> terms;
  std::vector<double> amplitudes;
  std::vector<double> phases;
};

struct GridParams {
  std::vector<double> lo{-20.0};
  std::vector<double> hi{20.0};
  std::vector<std::size_t> points{2048};
  Boundary boundary = Boundary::dirichlet_zero;
};

// A complete, validated run description.
struct Scenario {
  std::string name = "custom";
  HamiltonianParams hamiltonian;
  InitialState initial;
  GridParams grid;
  StochasticParams stochastic;  // stochastic.seed is the master seed
  double t_final = 1.0;
  std::vector<double> snapshots;  // defaults to {0, t_final}
  std::size_t trajectories = 10000;
  int initial_sign = 0;
  std::size_t factorization_samples = 0;  // compound 2D scenarios only

  HamiltonianSpec spec() const;
  SpatialGrid make_grid() const;
  WaveFunction initial_wavefunction() const;
  EnsembleConfig ensemble_config() const;
  // Throws ValidationError naming the offending field.
  void validate() const;
};

// Strict parsing: unknown keys are rejected, parse errors carry line and
// column, validation errors name the dotted field path.
Scenario parse_config(const std::string& text, const std::string& source = "<config>");
Scenario load_config(const std::string& path);
Scenario scenario_from_json(const nlohmann::json& j);
// Fully expanded form with every default filled in.
nlohmann::json dump(const Scenario& s);

std::vector<std::string> preset_names();
Scenario preset(const std::string& name);

// Sets a dotted key (e.g. "stochastic.lambda_mag"; the bare names
// lambda_mag, dt, flip_prob, seed, trajectories and t_final are accepted as
// shorthands) and revalidates.
Scenario with_value(const Scenario& s, const std::string& key, double value);

// 64-bit FNV-1a, used for config and artifact hashes.
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace stochaction
