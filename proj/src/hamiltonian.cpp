#include "stochaction/hamiltonian.hpp"

#include <cmath>

namespace stochaction {

HamiltonianSpec HamiltonianSpec::free_particle(double mass, int dim) {
  HamiltonianSpec spec;
  spec.dim = dim;
  spec.inverse_mass = {1.0 / mass, 1.0 / mass};
  spec.validate();
  return spec;
}

HamiltonianSpec HamiltonianSpec::harmonic(double mass, double omega, double center) {
  HamiltonianSpec spec = free_particle(mass, 1);
  const double k = mass * omega * omega;
  spec.potential = [k, center](const Point& q) { return 0.5 * k * (q[0] - center) * (q[0] - center); };
  return spec;
}

double HamiltonianSpec::energy(const Point& q, const Point& p) const {
  double kinetic = 0.0;
  for (int a = 0; a < dim; ++a) {
    const double pk = p[static_cast<std::size_t>(a)] - vector_potential_at(q, a);
    kinetic += 0.5 * metric(q, a) * pk * pk;
  }
  return kinetic + potential_at(q);
}

Point HamiltonianSpec::velocity(const Point& q, const Point& p) const {
  Point v{0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    const auto k = static_cast<std::size_t>(a);
    v[k] = metric(q, a) * (p[k] - vector_potential_at(q, a));
  }
  return v;
}

void HamiltonianSpec::validate() const {
  if (dim != 1 && dim != 2) throw ConfigurationError("action_model", "hamiltonian dimension must be 1 or 2");
  for (int a = 0; a < dim; ++a) {
    const double g = inverse_mass[static_cast<std::size_t>(a)];
    if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("action_model", "mass must be positive and finite");
  }
  if (dim == 2 && position_metric) {
    throw ConfigurationError("action_model", "position-dependent metric is only supported in 1D");
  }
}

void HamiltonianSpec::validate_on(const SpatialGrid& grid) const {
  validate();
  if (grid.dim() != dim) throw ConfigurationError("action_model", "hamiltonian and grid dimensions differ");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point q = grid.point(i);
    for (int a = 0; a < dim; ++a) {
      const double g = metric(q, a);
      if (!(g > 0.0) || !std::isfinite(g)) {
        throw DomainError("action_model", "metric must be strictly positive on the grid");
      }
      if (!std::isfinite(vector_potential_at(q, a))) {
        throw DomainError("action_model", "vector potential must be finite on the grid");
      }
    }
    if (!std::isfinite(potential_at(q))) throw DomainError("action_model", "potential must be finite on the grid");
  }
}

}  // namespace stochaction
