#pragma once

#include <array>
#include <functional>

#include "stochaction/grid.hpp"

namespace stochaction {

// Classical Hamiltonian H = 1/2 (p - a) g (p - a) + V.
//
// The metric g is diagonal. In 2D it must be constant (one inverse mass per
// axis); in 1D it may instead be a positive position-dependent B(q).
struct HamiltonianSpec {
  int dim = 1;
  std::array<double, 2> inverse_mass{1.0, 1.0};
  std::function<double(double)> position_metric;
  std::function<double(const Point&)> potential;
  std::function<Point(const Point&)> vector_potential;

  static HamiltonianSpec free_particle(double mass, int dim = 1);
  static HamiltonianSpec harmonic(double mass, double omega, double center = 0.0);

  double metric(const Point& q, int axis) const {
    if (position_metric && dim == 1) return position_metric(q[0]);
    return inverse_mass[static_cast<std::size_t>(axis)];
  }
  double potential_at(const Point& q) const { return potential ? potential(q) : 0.0; }
  double vector_potential_at(const Point& q, int axis) const {
    return vector_potential ? vector_potential(q)[static_cast<std::size_t>(axis)] : 0.0;
  }
  bool has_vector_potential() const { return static_cast<bool>(vector_potential); }

  // H(q, p).
  double energy(const Point& q, const Point& p) const;
  // dq/dt = g (p - a) for the given momentum.
  Point velocity(const Point& q, const Point& p) const;

  // Structural checks (dimension, masses, 2D metric restriction).
  void validate() const;
  // Metric strictly positive and potentials finite on every cell centre.
  void validate_on(const SpatialGrid& grid) const;
};

}  // namespace stochaction
