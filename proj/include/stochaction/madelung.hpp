#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "stochaction/hamiltonian.hpp"
#include "stochaction/quantum_solver.hpp"

namespace stochaction {

// Density and phase-gradient view of a wave function.
//
// Gradients are taken pointwise from psi (lambda Im(dpsi/psi) and
// 2 Re(dpsi/psi)), never from an unwrapped phase. Cells with rho < rho_eps
// are flagged in node_mask; their gradient values are copied from the
// nearest unmasked cell so interpolation near a node stays finite.
struct HydroFields {
  RealField rho;
  std::vector<RealField> s_grad;        // dS per axis
  std::vector<RealField> log_rho_grad;  // d rho / rho per axis
  MaskField node_mask;
  double lambda_mag = 1.0;
  double rho_eps = 0.0;
  double time = 0.0;
  Boundary boundary = Boundary::dirichlet_zero;

  const SpatialGrid& grid() const { return rho.grid(); }
  int dim() const { return grid().dim(); }
  std::size_t masked_count() const;
};

// rho_eps defaults to 1e-12 * max(rho). Throws NumericalError when every
// cell is a node.
HydroFields decompose(const WaveFunction& psi, Boundary boundary, std::optional<double> rho_eps = std::nullopt);

using VelocityField = std::vector<RealField>;

// g (dS - a).
VelocityField bohmian_velocity(const HydroFields& h, const HamiltonianSpec& spec);
// (lambda_signed / 2) d rho / rho, before the metric factor.
VelocityField osmotic_term(const HydroFields& h, double lambda_signed);
// g (dS + sign (lambda/2) d rho / rho - a).
VelocityField actual_velocity(const HydroFields& h, const HamiltonianSpec& spec, int sign, double lambda_mag);

// Q = -(lambda^2 / 2) d(g dR) / R with R = sqrt(rho). Zero on masked cells.
RealField quantum_potential(const HydroFields& h, const HamiltonianSpec& spec);

// Gradient form of the modified Hamilton-Jacobi equation,
//   d_t dS + d[ g (dS - a)^2 / 2 + V + Q ] = 0,
// evaluated at the middle snapshot with a centred time difference.
// 1D only. Masked cells and their neighbours are set to zero.
RealField hamilton_jacobi_residual(const HydroFields& before, const HydroFields& now, const HydroFields& after,
                                   const HamiltonianSpec& spec, double dt);

// d_t rho + d(rho v_B), same conventions.
RealField continuity_residual(const HydroFields& before, const HydroFields& now, const HydroFields& after,
                              const HamiltonianSpec& spec, double dt);

// (d rho / rho)^2 / 4 - [ d^2 rho / (2 rho) - d^2 R / R ] for a positive 1D
// density; vanishes in the continuum.
RealField log_derivative_identity_residual(const RealField& rho, Boundary boundary);

// CSV columns q, rho, s_grad, mask (1D) or qx, qy, rho, s_grad_x, s_grad_y, mask.
void write_hydro_csv(std::ostream& os, const HydroFields& h);

}  // namespace stochaction
