#include "stochaction/action_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stochaction/differential.hpp"
#include "stochaction/distribution.hpp"

namespace stochaction {

void StochasticParams::validate() const {
  if (!(lambda_mag > 0.0) || !std::isfinite(lambda_mag)) {
    throw ValidationError("action_model", "stochastic.lambda_mag", "must be positive and finite");
  }
  if (!(dt_step > 0.0) || !std::isfinite(dt_step)) {
    throw ValidationError("action_model", "stochastic.dt", "must be positive and finite");
  }
  if (!(flip_prob > 0.0 && flip_prob <= 1.0)) {
    throw ValidationError("action_model", "stochastic.flip_prob", "must lie in (0, 1]");
  }
}

double infinitesimal_action(const Point& q, const Point& qdot, double dt, const HamiltonianSpec& spec,
                            const SpatialGrid& domain) {
  if (!(dt > 0.0)) throw DomainError("action_model", "time step must be positive");
  if (!domain.contains(q)) throw DomainError("action_model", "extrapolation: q lies outside the grid domain");
  // L = qdot^2 / (2g) + a . qdot - V, the Legendre dual of H = g (p - a)^2 / 2 + V.
  double lagrangian = -spec.potential_at(q);
  for (int a = 0; a < spec.dim; ++a) {
    const double v = qdot[static_cast<std::size_t>(a)];
    lagrangian += 0.5 * v * v / spec.metric(q, a) + spec.vector_potential_at(q, a) * v;
  }
  return lagrangian * dt;
}

RealField theta(const std::vector<RealField>& s_grad, const HamiltonianSpec& spec, Boundary boundary) {
  if (s_grad.empty() || static_cast<int>(s_grad.size()) != spec.dim) {
    throw ConfigurationError("action_model", "theta needs one phase-gradient field per axis");
  }
  const SpatialGrid& grid = s_grad.front().grid();
  RealField out(grid);
  for (int a = 0; a < spec.dim; ++a) {
    const RealField& sg = s_grad[static_cast<std::size_t>(a)];
    require_same_grid(grid, sg.grid(), "action_model");
    RealField velocity(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Point q = grid.point(i);
      velocity[i] = spec.metric(q, a) * (sg[i] - spec.vector_potential_at(q, a));
    }
    const RealField div = gradient(velocity, boundary, a);
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] += div[i];
  }
  return out;
}

RealField theta_from_phase(const RealField& phase, const HamiltonianSpec& spec, Boundary boundary) {
  const SpatialGrid& grid = phase.grid();
  RealField out(grid);
  for (int a = 0; a < spec.dim; ++a) {
    const RealField g = RealField::sample(grid, [&](const Point& q) { return spec.metric(q, a); });
    const RealField flux = laplacian_weighted(phase, g, boundary, a);
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] += flux[i];
    if (spec.has_vector_potential()) {
      const RealField ga = RealField::sample(
          grid, [&](const Point& q) { return spec.metric(q, a) * spec.vector_potential_at(q, a); });
      const RealField div = gradient(ga, boundary, a);
      for (std::size_t i = 0; i < grid.size(); ++i) out[i] -= div[i];
    }
  }
  return out;
}

DeviationSample sample_deviation(const StochasticParams& params, int sign_branch, RngStream& rng) {
  if (sign_branch != 1 && sign_branch != -1) throw ConfigurationError("action_model", "sign branch must be +1 or -1");
  const double magnitude = -0.5 * params.lambda_mag * std::log(rng.uniform());
  return {sign_branch * magnitude, sign_branch};
}

double transition_log_density(double dev, double theta_val, double dt, double lambda_signed) {
  if (lambda_signed == 0.0) throw DomainError("action_model", "lambda must be non-zero");
  const double ratio = dev / lambda_signed;
  if (ratio < 0.0) return -std::numeric_limits<double>::infinity();
  return -2.0 * ratio - theta_val * dt;
}

nlohmann::json to_json(const FactorizationReport& r) {
  return {{"tv_joint", r.tv_joint},
          {"tv_sweep_max", r.tv_sweep_max},
          {"n_samples", r.n_samples},
          {"seed", r.seed},
          {"sweep_amplitudes", r.sweep_amplitudes},
          {"mean_abs_dev1", r.mean_abs_dev1},
          {"mean_abs_dev2", r.mean_abs_dev2}};
}

namespace {

constexpr std::size_t kFactorBins = 20;

HamiltonianSpec with_probe(const HamiltonianSpec& base, double amplitude) {
  HamiltonianSpec spec = base;
  auto v = base.potential;
  spec.potential = [v, amplitude](const Point& q) { return (v ? v(q) : 0.0) + 0.5 * amplitude * q[0] * q[0]; };
  return spec;
}

std::size_t bin_of(double x, double hi) {
  const auto k = static_cast<std::size_t>(x / hi * static_cast<double>(kFactorBins));
  return std::min(k, kFactorBins - 1);
}

}  // namespace

FactorizationReport verify_factorization(const HamiltonianSpec& spec1, const HamiltonianSpec& spec2,
                                         const StochasticParams& params, std::size_t n_samples,
                                         const std::vector<double>& sweep_amplitudes) {
  params.validate();
  spec1.validate();
  spec2.validate();
  if (spec1.dim != 1 || spec2.dim != 1) {
    throw ConfigurationError("action_model", "factorization check needs two 1D subsystems");
  }
  if (n_samples < 1000) throw ConfigurationError("action_model", "insufficient samples: need at least 1000");
  if (sweep_amplitudes.empty()) throw ConfigurationError("action_model", "sweep needs at least one amplitude");

  const SpatialGrid domain = SpatialGrid::line(-2.0, 2.0, 8);
  const double dt = params.dt_step;
  const double lambda = params.lambda_mag;
  const double hi = 5.0 * lambda;  // ten mean deviations

  FactorizationReport report;
  report.n_samples = n_samples;
  report.seed = params.seed;
  report.sweep_amplitudes = sweep_amplitudes;

  std::vector<std::vector<double>> marginals1;
  for (std::size_t k = 0; k < sweep_amplitudes.size(); ++k) {
    const HamiltonianSpec s2 = with_probe(spec2, sweep_amplitudes[k]);
    const std::uint64_t sweep_seed = splitmix64(params.seed + k);
    std::vector<double> joint(kFactorBins * kFactorBins, 0.0);
    std::vector<double> m1(kFactorBins, 0.0);
    std::vector<double> m2(kFactorBins, 0.0);
    double sum1 = 0.0;
    double sum2 = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
      RngStream rng(sweep_seed, i, StreamPurpose::factorization);
      const int sign = rng.uniform() < 0.5 ? -1 : 1;
      const Point q1{2.0 * rng.uniform() - 1.0, 0.0};
      const Point v1{2.0 * rng.uniform() - 1.0, 0.0};
      const Point q2{2.0 * rng.uniform() - 1.0, 0.0};
      const Point v2{2.0 * rng.uniform() - 1.0, 0.0};
      const double da1 = infinitesimal_action(q1, v1, dt, spec1, domain);
      const double da2 = infinitesimal_action(q2, v2, dt, s2, domain);
      const double total = -0.5 * lambda * (std::log(rng.uniform()) + std::log(rng.uniform()));
      const double split = rng.uniform();
      const double ds1 = da1 + sign * split * total;
      const double ds2 = da2 + sign * (1.0 - split) * total;
      const double d1 = std::abs(ds1 - da1);
      const double d2 = std::abs(ds2 - da2);
      sum1 += d1;
      sum2 += d2;
      const std::size_t b1 = bin_of(d1, hi);
      const std::size_t b2 = bin_of(d2, hi);
      joint[b1 * kFactorBins + b2] += 1.0;
      m1[b1] += 1.0;
      m2[b2] += 1.0;
    }
    std::vector<double> product(kFactorBins * kFactorBins);
    for (std::size_t a = 0; a < kFactorBins; ++a) {
      for (std::size_t b = 0; b < kFactorBins; ++b) product[a * kFactorBins + b] = m1[a] * m2[b];
    }
    report.tv_joint = std::max(report.tv_joint, total_variation(joint, product));
    report.mean_abs_dev1.push_back(sum1 / static_cast<double>(n_samples));
    report.mean_abs_dev2.push_back(sum2 / static_cast<double>(n_samples));
    marginals1.push_back(std::move(m1));
  }
  for (std::size_t a = 0; a < marginals1.size(); ++a) {
    for (std::size_t b = a + 1; b < marginals1.size(); ++b) {
      report.tv_sweep_max = std::max(report.tv_sweep_max, total_variation(marginals1[a], marginals1[b]));
    }
  }
  return report;
}

}  // namespace stochaction
