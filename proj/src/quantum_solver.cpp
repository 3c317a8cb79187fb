#include "stochaction/quantum_solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "stochaction/differential.hpp"

namespace stochaction {

double WaveFunction::norm() const { return stochaction::norm(psi); }

void WaveFunction::normalize() {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("quantum_solver", "cannot normalize a zero wave function");
  for (Complex& v : psi.values()) v /= n;
}

DiscreteHamiltonian DiscreteHamiltonian::build(const HamiltonianSpec& spec, const SpatialGrid& grid,
                                               Boundary boundary, double lambda_mag) {
  spec.validate_on(grid);
  if (!(lambda_mag > 0.0)) throw DomainError("quantum_solver", "lambda_mag must be positive");
  DiscreteHamiltonian h;
  h.grid_ = grid;
  h.boundary_ = boundary;
  h.lambda_ = lambda_mag;
  h.diagonal_.assign(grid.size(), 0.0);
  const double lam2 = lambda_mag * lambda_mag;

  auto edge_metric = [&](const Point& mid, int a) {
    const double g = spec.metric(mid, a);
    if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("quantum_solver", "metric must be strictly positive");
    return g;
  };

  for (int a = 0; a < grid.dim(); ++a) {
    const double dx = grid.spacing(a);
    const double scale = lam2 / (2.0 * dx * dx);
    const std::size_t n = grid.points(a);
    const std::size_t s = grid.stride(a);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      const std::size_t i = grid.coordinate_index(idx, a);
      Point q = grid.point(idx);
      h.diagonal_[idx] += a == 0 ? spec.potential_at(q) : 0.0;
      Point plus_mid = q;
      plus_mid[static_cast<std::size_t>(a)] += 0.5 * dx;
      if (i + 1 < n || boundary == Boundary::periodic) {
        const std::size_t to = i + 1 < n ? idx + s : idx - (n - 1) * s;
        const double g = edge_metric(plus_mid, a);
        const double phase = -spec.vector_potential_at(plus_mid, a) * dx / lambda_mag;
        h.edges_.push_back({idx, to, -scale * g * Complex{std::cos(phase), std::sin(phase)}});
        h.diagonal_[idx] += scale * g;
        h.diagonal_[to] += scale * g;
      } else {
        h.diagonal_[idx] += scale * edge_metric(plus_mid, a);
      }
      if (i == 0 && boundary == Boundary::dirichlet_zero) {
        Point minus_mid = q;
        minus_mid[static_cast<std::size_t>(a)] -= 0.5 * dx;
        h.diagonal_[idx] += scale * edge_metric(minus_mid, a);
      }
    }
  }
  return h;
}

void DiscreteHamiltonian::apply(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != diagonal_.size() || out.size() != diagonal_.size()) {
    throw ConfigurationError("quantum_solver", "field size does not match the Hamiltonian");
  }
  for (std::size_t i = 0; i < diagonal_.size(); ++i) out[i] = diagonal_[i] * in[i];
  for (const Edge& e : edges_) {
    out[e.from] += e.coupling * in[e.to];
    out[e.to] += std::conj(e.coupling) * in[e.from];
  }
}

ComplexField DiscreteHamiltonian::apply(const ComplexField& psi) const {
  require_same_grid(grid_, psi.grid(), "quantum_solver");
  ComplexField out(grid_);
  apply(psi.values(), out.values());
  return out;
}

double DiscreteHamiltonian::expectation(const ComplexField& psi) const {
  return inner_product(psi, apply(psi)).real();
}

DiscreteHamiltonian::Assembled DiscreteHamiltonian::assemble(Complex alpha, Complex beta) const {
  const std::size_t bw = grid_.dim() == 2 ? grid_.points(1) : 1;
  if (grid_.dim() == 2 && boundary_ == Boundary::periodic) {
    throw ConfigurationError("quantum_solver", "periodic boundaries are supported for 1D solves only");
  }
  Assembled out{BandedMatrix(grid_.size(), bw)};
  for (std::size_t i = 0; i < diagonal_.size(); ++i) out.band.at(i, i) = alpha + beta * diagonal_[i];
  for (const Edge& e : edges_) {
    const std::size_t gap = e.from > e.to ? e.from - e.to : e.to - e.from;
    if (gap <= bw) {
      out.band.at(e.from, e.to) += beta * e.coupling;
      out.band.at(e.to, e.from) += beta * std::conj(e.coupling);
    } else {
      // Periodic wrap edge from the last cell to the first.
      out.cyclic = true;
      out.bottom_left += beta * e.coupling;
      out.top_right += beta * std::conj(e.coupling);
    }
  }
  return out;
}

namespace {

std::variant<BandedMatrix, CyclicBandedSystem> make_system(DiscreteHamiltonian::Assembled assembled) {
  if (assembled.cyclic) {
    return CyclicBandedSystem(std::move(assembled.band), assembled.top_right, assembled.bottom_left);
  }
  assembled.band.factorize();
  return std::move(assembled.band);
}

}  // namespace

CrankNicolson::CrankNicolson(const DiscreteHamiltonian& hamiltonian, double dt)
    : hamiltonian_(hamiltonian),
      dt_(dt),
      tau_(0.0, dt / (2.0 * hamiltonian.lambda_mag())),
      system_(make_system(hamiltonian.assemble({1.0, 0.0}, tau_))) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("quantum_solver", "time step must be positive");
}

void CrankNicolson::solve(std::span<Complex> rhs) const {
  std::visit([&](const auto& sys) { sys.solve(rhs); }, system_);
}

void CrankNicolson::step_in_place(WaveFunction& psi) const {
  require_same_grid(hamiltonian_.grid(), psi.psi.grid(), "quantum_solver");
  const std::size_t n = psi.psi.size();
  std::vector<Complex> hpsi(n);
  hamiltonian_.apply(psi.psi.values(), hpsi);
  std::vector<Complex> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = psi.psi[i] - tau_ * hpsi[i];
  std::vector<Complex> x = rhs;
  solve(x);

  // Residual of (1 + tau H) x = rhs.
  hamiltonian_.apply(x, hpsi);
  double r2 = 0.0;
  double b2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r2 += std::norm(x[i] + tau_ * hpsi[i] - rhs[i]);
    b2 += std::norm(rhs[i]);
  }
  const double residual = b2 > 0.0 ? std::sqrt(r2 / b2) : std::sqrt(r2);
  if (!(residual <= 1e-9)) {
    std::ostringstream msg;
    msg << "Crank-Nicolson solve failed: relative residual " << residual;
    throw NumericalError("quantum_solver", msg.str());
  }
  std::copy(x.begin(), x.end(), psi.psi.values().begin());
  psi.time += dt_;
}

WaveFunction CrankNicolson::step(const WaveFunction& psi) const {
  WaveFunction out = psi;
  step_in_place(out);
  return out;
}

WaveFunction step(const WaveFunction& psi, const DiscreteHamiltonian& hamiltonian, double dt) {
  return CrankNicolson(hamiltonian, dt).step(psi);
}

std::size_t steps_for(double t, double dt) {
  if (!(dt > 0.0)) throw ConfigurationError("quantum_solver", "time step must be positive");
  if (t < 0.0) throw ConfigurationError("quantum_solver", "times must be non-negative");
  const double k = std::round(t / dt);
  if (std::abs(k * dt - t) > 1e-9 * std::max(1.0, t)) {
    throw ConfigurationError("quantum_solver", "solver dt must divide every snapshot time and t_final");
  }
  return static_cast<std::size_t>(k);
}

std::vector<WaveFunction> evolve(const WaveFunction& psi, const DiscreteHamiltonian& hamiltonian, double t_final,
                                 double dt, std::span<const double> snapshot_times) {
  const std::size_t total = steps_for(t_final, dt);
  std::vector<std::size_t> wanted;
  for (double t : snapshot_times) {
    if (t > t_final + 1e-12) throw ConfigurationError("quantum_solver", "snapshot time beyond t_final");
    wanted.push_back(steps_for(t, dt));
  }
  std::vector<WaveFunction> out(wanted.size());
  WaveFunction current = psi;
  auto record = [&](std::size_t k) {
    for (std::size_t s = 0; s < wanted.size(); ++s) {
      if (wanted[s] == k) {
        out[s] = current;
        out[s].time = psi.time + static_cast<double>(k) * dt;
      }
    }
  };
  record(0);
  if (total > 0) {
    const CrankNicolson propagator(hamiltonian, dt);
    for (std::size_t k = 1; k <= total; ++k) {
      propagator.step_in_place(current);
      record(k);
    }
  }
  return out;
}

WaveFunction refine_eigenstate(const DiscreteHamiltonian& hamiltonian, const WaveFunction& guess, double shift,
                               int iterations) {
  auto system = make_system(hamiltonian.assemble({-shift, 0.0}, {1.0, 0.0}));
  WaveFunction out = guess;
  out.normalize();
  for (int it = 0; it < iterations; ++it) {
    std::visit([&](const auto& sys) { sys.solve(out.psi.values()); }, system);
    out.normalize();
  }
  return out;
}

ComplexField sandwich_ordering_difference(const ComplexField& psi, const std::function<double(double)>& metric,
                                          Boundary boundary, double lambda_mag) {
  const SpatialGrid& grid = psi.grid();
  if (grid.dim() != 1) throw ConfigurationError("quantum_solver", "ordering check is one-dimensional");
  HamiltonianSpec spec;
  spec.position_metric = metric;
  const DiscreteHamiltonian h = DiscreteHamiltonian::build(spec, grid, boundary, lambda_mag);
  const ComplexField sandwich = h.apply(psi);  // (1/2) p B p psi

  const RealField ones(grid, 1.0);
  const double lam2 = lambda_mag * lambda_mag;
  ComplexField b_psi(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) b_psi[i] = metric(grid.point(i)[0]) * psi[i];
  const ComplexField p2_b_psi = laplacian_weighted(b_psi, ones, boundary);
  const ComplexField p2_psi = laplacian_weighted(psi, ones, boundary);

  ComplexField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double b = metric(grid.point(i)[0]);
    out[i] = 2.0 * sandwich[i] - 0.5 * (-lam2 * p2_b_psi[i] - lam2 * b * p2_psi[i]);
  }
  return out;
}

void write_wavefunction_csv(std::ostream& os, const WaveFunction& psi) {
  const SpatialGrid& g = psi.psi.grid();
  os << std::setprecision(17);
  os << (g.dim() == 2 ? "qx,qy,re,im\n" : "q,re,im\n");
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point q = g.point(i);
    os << q[0] << ',';
    if (g.dim() == 2) os << q[1] << ',';
    os << psi.psi[i].real() << ',' << psi.psi[i].imag() << '\n';
  }
}

nlohmann::json snapshot_metadata(const WaveFunction& psi, const DiscreteHamiltonian& hamiltonian) {
  return {{"time", psi.time},
          {"norm", psi.norm()},
          {"energy", hamiltonian.expectation(psi.psi)},
          {"lambda_mag", psi.lambda_mag}};
}

}  // namespace stochaction
