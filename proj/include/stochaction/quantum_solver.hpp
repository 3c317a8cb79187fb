#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "json.hpp"

#include "stochaction/banded.hpp"
#include "stochaction/hamiltonian.hpp"

namespace stochaction {

// Complex amplitude on a grid. lambda_mag plays the role of hbar.
struct WaveFunction {
  ComplexField psi;
  double time = 0.0;
  double lambda_mag = 1.0;

  double norm() const;
  void normalize();
};

// Discrete 1/2 (p - a) g (p - a) + V with p = -i lambda d/dq.
//
// Each edge between neighbouring cells carries the metric evaluated at the
// edge midpoint and a Peierls phase exp(-i a h / lambda); the matrix is
// Hermitian by construction and reduces to the three-point (five-point in
// 2D) stencil when a = 0.
class DiscreteHamiltonian {
 public:
  static DiscreteHamiltonian build(const HamiltonianSpec& spec, const SpatialGrid& grid, Boundary boundary,
                                   double lambda_mag);

  const SpatialGrid& grid() const { return grid_; }
  Boundary boundary() const { return boundary_; }
  double lambda_mag() const { return lambda_; }

  void apply(std::span<const Complex> in, std::span<Complex> out) const;
  ComplexField apply(const ComplexField& psi) const;
  // Re <psi, H psi>.
  double expectation(const ComplexField& psi) const;

  // alpha I + beta H as a band matrix; corner couplings of periodic 1D
  // grids are returned separately (top-right, bottom-left).
  struct Assembled {
    BandedMatrix band;
    Complex top_right{0.0, 0.0};
    Complex bottom_left{0.0, 0.0};
    bool cyclic = false;
  };
  Assembled assemble(Complex alpha, Complex beta) const;

 private:
  struct Edge {
    std::size_t from;
    std::size_t to;    // `from` + stride, or the wrapped partner
    Complex coupling;  // H[from][to]; H[to][from] is the conjugate
  };

  SpatialGrid grid_;
  Boundary boundary_ = Boundary::dirichlet_zero;
  double lambda_ = 1.0;
  std::vector<double> diagonal_;
  std::vector<Edge> edges_;
};

// Crank-Nicolson propagator (1 + i dt H / 2 lambda) psi' = (1 - i dt H / 2 lambda) psi,
// factorized once for a fixed (H, dt).
class CrankNicolson {
 public:
  CrankNicolson(const DiscreteHamiltonian& hamiltonian, double dt);

  double dt() const { return dt_; }
  const DiscreteHamiltonian& hamiltonian() const { return hamiltonian_; }

  // Throws NumericalError (with the relative residual) if the solve fails.
  WaveFunction step(const WaveFunction& psi) const;
  void step_in_place(WaveFunction& psi) const;

 private:
  void solve(std::span<Complex> rhs) const;

  DiscreteHamiltonian hamiltonian_;
  double dt_;
  Complex tau_;
  std::variant<BandedMatrix, CyclicBandedSystem> system_;
};

WaveFunction step(const WaveFunction& psi, const DiscreteHamiltonian& hamiltonian, double dt);

// Number of steps of size dt covering `t`; throws ConfigurationError if dt
// does not divide t.
std::size_t steps_for(double t, double dt);

// Iterates the propagator to t_final and returns the states at the requested
// snapshot times (each must be a multiple of dt in [0, t_final]).
std::vector<WaveFunction> evolve(const WaveFunction& psi, const DiscreteHamiltonian& hamiltonian, double t_final,
                                 double dt, std::span<const double> snapshot_times);

// Shifted inverse iteration on the discrete Hamiltonian; returns the
// normalized eigenvector nearest `shift` starting from `guess`.
WaveFunction refine_eigenstate(const DiscreteHamiltonian& hamiltonian, const WaveFunction& guess, double shift,
                               int iterations = 4);

// p B(q) p psi - (p^2 B psi + B p^2 psi) / 2 on a 1D grid, with the
// sandwich built exactly like the Hamiltonian and p^2 the three-point
// stencil. The continuum difference is lambda^2 psi.
ComplexField sandwich_ordering_difference(const ComplexField& psi, const std::function<double(double)>& metric,
                                          Boundary boundary, double lambda_mag);

// CSV rows "q,re,im" (1D) or "qx,qy,re,im" (2D).
void write_wavefunction_csv(std::ostream& os, const WaveFunction& psi);
nlohmann::json snapshot_metadata(const WaveFunction& psi, const DiscreteHamiltonian& hamiltonian);

}  // namespace stochaction
