#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "stochaction/grid.hpp"
#include "stochaction/hamiltonian.hpp"
#include "stochaction/rng.hpp"

namespace stochaction {

// Parameters of the stochastic layer. The sign of lambda follows a
// dichotomous process that flips with `flip_prob` per integrator step;
// only the magnitude is stored.
struct StochasticParams {
  double lambda_mag = 1.0;
  double dt_step = 1e-3;
  double flip_prob = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

// One realization of dS - dA. sign(value) == sign_branch (zero only when
// the magnitude underflows).
struct DeviationSample {
  double value = 0.0;
  int sign_branch = 1;
};

// dA = L dt along the stationary segment with velocity qdot at q.
// Throws DomainError when q lies outside `domain`.
double infinitesimal_action(const Point& q, const Point& qdot, double dt, const HamiltonianSpec& spec,
                            const SpatialGrid& domain);

// theta = div( g (dS - a) ) from the per-axis phase gradient, using central
// differences of the velocity field.
RealField theta(const std::vector<RealField>& s_grad, const HamiltonianSpec& spec, Boundary boundary);

// Same quantity from the phase itself in flux form: d(g dS) - d(g a).
RealField theta_from_phase(const RealField& phase, const HamiltonianSpec& spec, Boundary boundary);

// |dS - dA| ~ Exponential(mean |lambda| / 2) by inverse CDF; the sign
// matches the current branch so (dS - dA) / lambda stays positive.
DeviationSample sample_deviation(const StochasticParams& params, int sign_branch, RngStream& rng);

// log P(dS - dA) up to an additive constant: -(2/lambda) dev - theta dt.
// Returns -infinity when dev / lambda < 0.
double transition_log_density(double dev, double theta_val, double dt, double lambda_signed);

struct FactorizationReport {
  double tv_joint = 0.0;
  double tv_sweep_max = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> sweep_amplitudes;
  std::vector<double> mean_abs_dev1;
  std::vector<double> mean_abs_dev2;
};

nlohmann::json to_json(const FactorizationReport& r);

// Locality check for two non-interacting 1D subsystems. For each sweep
// amplitude A the second subsystem gets an extra probe potential A q^2 / 2.
// Compound deviations are drawn from the joint exponential law
// exp(-2 (dev1 + dev2) / lambda) (gamma-distributed total, uniform split),
// and dS_i - dA_i is recovered per particle from random stationary segments.
// Reports the TV distance between the joint 20x20 histogram and the product
// of its marginals (max over the sweep), and the max pairwise TV of the
// particle-1 marginal across the sweep.
FactorizationReport verify_factorization(const HamiltonianSpec& spec1, const HamiltonianSpec& spec2,
                                         const StochasticParams& params, std::size_t n_samples,
                                         const std::vector<double>& sweep_amplitudes = {0.0, 1.0, 10.0});

}  // namespace stochaction
