#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "stochaction/trajectory.hpp"

namespace stochaction {

inline constexpr std::size_t kBatches = 32;

struct Estimate {
  double value = 0.0;
  double error = 0.0;
  std::size_t n = 0;
};

// Batch-means estimate of the mean of xs. The error is floored at the
// rounding level so it stays positive for n > 1 even on constant data.
Estimate batch_mean(std::span<const double> xs, std::size_t batches = kBatches);

// Statistic over an index range; the value uses all n samples, the error is
// the spread of the statistic over `batches` contiguous blocks / sqrt(batches).
Estimate batch_statistic(std::size_t n, const std::function<double(std::size_t, std::size_t)>& stat,
                         std::size_t batches = kBatches);

struct ObservableReport {
  std::string name;
  double ensemble = 0.0;
  double mc_err = 0.0;
  double quantum = 0.0;
  double z = 0.0;
  std::size_t n = 0;
  double time = 0.0;
  double quantum_imag = 0.0;  // imaginary part of the quadrature, a self-check
};

nlohmann::json to_json(const ObservableReport& r);
// Suite summary: observable,ensemble,mc_err,quantum,z (plus n, time).
void write_reports_csv(std::ostream& os, const std::vector<ObservableReport>& reports);

// z = |ensemble - quantum| / mc_err.
double z_score(double ensemble, double quantum, double mc_err);

// <f(q)> over the surviving ensemble vs sum f |psi|^2 dV.
ObservableReport mean_position_function(const EnsembleSnapshot& snap, const std::function<double(const Point&)>& f,
                                        const std::string& name);
// <(q - <q>)^2> along `axis`; the quantum side uses the exact quadrature mean.
ObservableReport position_variance(const EnsembleSnapshot& snap, int axis = 0);

// <p> vs <psi| -i lambda D |psi> along `axis`.
ObservableReport mean_momentum(const EnsembleSnapshot& snap, int axis = 0);
// Mean of the branch term sign (lambda/2) d rho / rho alone; quantum side 0.
ObservableReport mean_osmotic_momentum(const EnsembleSnapshot& snap, int axis = 0);
// <(p - d)^2> vs || (-i lambda D - d) psi ||^2.
ObservableReport mean_quadratic_momentum(const EnsembleSnapshot& snap, double d, int axis = 0);
// <H(q, p)> vs <psi|H|psi> with the solver's discrete Hamiltonian.
ObservableReport mean_energy(const EnsembleSnapshot& snap, const HamiltonianSpec& spec);
// 2D: <q_x p_y - q_y p_x> vs <psi| q_x p_y - q_y p_x |psi>.
ObservableReport mean_angular_momentum_2d(const EnsembleSnapshot& snap);

// <p^2> = <(dS)^2> + <u^2> + 2 <dS u>, u the branch term. The cross term
// should vanish because the two branches are equally likely.
struct MomentumSplitReport {
  Estimate phase_part;
  Estimate osmotic_part;
  Estimate cross_term;
  double cross_z = 0.0;
};
MomentumSplitReport momentum_split(const EnsembleSnapshot& snap, int axis = 0);

// <(-i lambda D)^3> by three central differences, and the ensemble value
// of the model predicted by quadrature: sum rho (s^3 + 3 s u^2) dV.
double quantum_p3(const WaveFunction& psi, Boundary boundary);
double model_p3(const HydroFields& h);

struct DiscrepancyReport {
  double ensemble = 0.0;
  double mc_err = 0.0;
  double quantum = 0.0;
  double model_quadrature = 0.0;
  double z_gap = 0.0;    // |ensemble - quantum| / mc_err
  double z_model = 0.0;  // |ensemble - model_quadrature| / mc_err
  bool inconclusive = false;  // z_gap < 5
  std::size_t n = 0;
  double time = 0.0;
};
DiscrepancyReport p3_discrepancy(const EnsembleSnapshot& snap);
nlohmann::json to_json(const DiscrepancyReport& r);

struct InequalityCheck {
  std::string name;
  double value = 0.0;
  double mc_err = 0.0;
  double bound = 0.0;
  bool holds = false;  // value >= bound - 4 mc_err
};

struct UncertaintyReport {
  InequalityCheck position_osmotic;  // <(q - <q>)^2> <(m qdot - dS)^2> >= lambda^2/4
  InequalityCheck position_momentum; // Var(q) Var(p) >= lambda^2/4
  InequalityCheck momentum_osmotic;  // Var(p) >= <u^2>
  double var_q = 0.0;
  double var_p = 0.0;
  double quantum_product = 0.0;  // same product from the wave function
  std::size_t n = 0;
  double time = 0.0;

  bool all_hold() const {
    return position_osmotic.holds && position_momentum.holds && momentum_osmotic.holds;
  }
};
UncertaintyReport uncertainty_report(const EnsembleSnapshot& snap, int axis = 0);
nlohmann::json to_json(const UncertaintyReport& r);

// Quadrature moments of a wave function along `axis`.
struct QuantumMoments {
  double mean_q = 0.0;
  double var_q = 0.0;
  double mean_p = 0.0;
  double var_p = 0.0;
};
QuantumMoments quantum_moments(const WaveFunction& psi, Boundary boundary, int axis = 0);

}  // namespace stochaction
