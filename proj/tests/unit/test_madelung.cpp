#include <cmath>
#include <numbers>

#include "doctest.h"

#include "stochaction/madelung.hpp"

using namespace stochaction;

namespace {

WaveFunction from_fields(const SpatialGrid& g, const std::function<double(double)>& rho,
                         const std::function<double(double)>& phase, double lambda = 1.0) {
  WaveFunction w;
  w.lambda_mag = lambda;
  w.psi = ComplexField::sample(g, [&](const Point& q) {
    return std::sqrt(rho(q[0])) * std::exp(Complex{0.0, phase(q[0]) / lambda});
  });
  return w;
}

double max_off(const RealField& f, const std::function<double(double)>& exact, double range) {
  double e = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double q = f.grid().point(i)[0];
    if (std::abs(q) <= range) e = std::max(e, std::abs(f[i] - exact(q)));
  }
  return e;
}

}  // namespace

TEST_CASE("plane wave and real gaussian") {
  const SpatialGrid g = SpatialGrid::line(0.0, 2.0 * std::numbers::pi, 200);
  const double p0 = 2.0;
  WaveFunction w = from_fields(g, [](double) { return 1.0; }, [&](double q) { return p0 * q; });
  const HydroFields h = decompose(w, Boundary::periodic);
  // central differences of e^{i k q} give sin(k h)/h
  const double dx = g.spacing(0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(h.s_grad[0][i] == doctest::Approx(std::sin(p0 * dx) / dx).epsilon(1e-12));
    CHECK(h.rho[i] == doctest::Approx(1.0));
  }
  CHECK(h.masked_count() == 0);
  const auto vb = bohmian_velocity(h, HamiltonianSpec::free_particle(2.0));
  CHECK(vb[0][10] == doctest::Approx(std::sin(p0 * dx) / dx / 2.0));
  // uniform density: both branches move with the Bohmian velocity
  const auto vp = actual_velocity(h, HamiltonianSpec::free_particle(2.0), 1, 1.0);
  const auto vm = actual_velocity(h, HamiltonianSpec::free_particle(2.0), -1, 1.0);
  CHECK(std::abs(vp[0][10] - vb[0][10]) <= 1e-12);
  CHECK(std::abs(vm[0][10] - vb[0][10]) <= 1e-12);

  const SpatialGrid line = SpatialGrid::line(-8.0, 8.0, 400);
  const HydroFields real = decompose(from_fields(line, [](double q) { return std::exp(-q * q); }, [](double) { return 0.0; }),
                                     Boundary::dirichlet_zero);
  for (std::size_t i = 0; i < line.size(); ++i) CHECK(real.s_grad[0][i] == 0.0);
}

TEST_CASE("decompose recovers smooth phase and density gradients") {
  double errs[2], rerrs[2];
  int k = 0;
  for (std::size_t n : {400u, 800u}) {
    const SpatialGrid g = SpatialGrid::line(-6.0, 6.0, n);
    auto rho = [](double q) { return std::exp(-(q - 0.5) * (q - 0.5) / 2.0); };
    auto phase = [](double q) { return 0.3 * q * q + std::sin(q); };
    const HydroFields h = decompose(from_fields(g, rho, phase, 0.7), Boundary::dirichlet_zero);
    errs[k] = max_off(h.s_grad[0], [](double q) { return 0.6 * q + std::cos(q); }, 3.0);
    rerrs[k] = max_off(h.log_rho_grad[0], [](double q) { return -(q - 0.5); }, 3.0);
    ++k;
  }
  CHECK(errs[0] <= 1e-2);
  CHECK(rerrs[0] <= 5e-2);
  CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(std::log2(rerrs[0] / rerrs[1]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("osmotic term of a gaussian density") {
  const SpatialGrid g = SpatialGrid::line(-8.0, 8.0, 1600);
  const double mu = 0.5, s2 = 1.5;
  const HydroFields h = decompose(
      from_fields(g, [&](double q) { return std::exp(-(q - mu) * (q - mu) / (2.0 * s2)); }, [](double) { return 0.0; }),
      Boundary::dirichlet_zero);
  const auto up = osmotic_term(h, 1.0);
  const auto down = osmotic_term(h, -1.0);
  CHECK(max_off(up[0], [&](double q) { return -(q - mu) / (2.0 * s2); }, 3.0) <= 1e-4);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(down[0][i] == -up[0][i]);

  const HydroFields flat = decompose(from_fields(g, [](double) { return 1.0; }, [](double) { return 0.0; }),
                                     Boundary::periodic);
  const auto zero = osmotic_term(flat, 1.0);
  for (double v : zero[0].values()) CHECK(v == 0.0);
}

TEST_CASE("branch average equals the bohmian velocity") {
  const SpatialGrid g = SpatialGrid::line(-6.0, 6.0, 300);
  HamiltonianSpec spec = HamiltonianSpec::free_particle(1.3);
  spec.vector_potential = [](const Point& q) { return Point{0.2 * q[0], 0.0}; };
  const HydroFields h = decompose(
      from_fields(g, [](double q) { return (1.0 + q * q) * std::exp(-q * q); }, [](double q) { return std::sin(q); }),
      Boundary::dirichlet_zero);
  const auto vb = bohmian_velocity(h, spec);
  const auto vp = actual_velocity(h, spec, 1, 1.0);
  const auto vm = actual_velocity(h, spec, -1, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (h.node_mask[i]) continue;
    CHECK(std::abs(0.5 * (vp[0][i] + vm[0][i]) - vb[0][i]) <= 1e-12);
  }
  // extrema of rho: both branches coincide with v_B
  std::size_t centre = g.size() / 2;
  const double dq = std::abs(vp[0][centre] - vm[0][centre]);
  CHECK(dq <= 2e-2);
}

TEST_CASE("nodes of the first excited state are masked") {
  const SpatialGrid g = SpatialGrid::line(-8.0, 8.0, 401);  // odd: a cell centre sits on q = 0
  const HydroFields h = decompose(
      from_fields(g, [](double q) { return q * q * std::exp(-q * q); }, [](double) { return 0.0; }),
      Boundary::dirichlet_zero);
  CHECK(h.node_mask[200] == 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::isfinite(h.s_grad[0][i]));
    CHECK(std::isfinite(h.log_rho_grad[0][i]));
  }
  WaveFunction zero;
  zero.psi = ComplexField(g);
  CHECK_THROWS_AS(decompose(zero, Boundary::dirichlet_zero), NumericalError);
}

TEST_CASE("log-derivative identity") {
  double errs[2];
  int k = 0;
  for (std::size_t n : {400u, 800u}) {
    const SpatialGrid g = SpatialGrid::line(-5.0, 5.0, n);
    const RealField rho = RealField::sample(g, [](const Point& q) { return std::exp(-q[0] * q[0] / 2.0) * (1.2 + std::sin(q[0])); });
    const RealField r = log_derivative_identity_residual(rho, Boundary::dirichlet_zero);
    errs[k++] = max_off(r, [](double) { return 0.0; }, 3.0);
  }
  CHECK(errs[0] <= 1e-2);
  CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("hamilton-jacobi and continuity residuals of solver states") {
  auto residual = [](std::size_t n, double dt) {
    const SpatialGrid g = SpatialGrid::line(-10.0, 10.0, n);
    const auto spec = HamiltonianSpec::harmonic(1.0, 1.0, 0.0);
    const auto h = DiscreteHamiltonian::build(spec, g, Boundary::dirichlet_zero, 1.0);
    WaveFunction w = from_fields(g, [](double q) { return std::exp(-(q - 1.0) * (q - 1.0)); },
                                 [](double q) { return 0.5 * q; });
    w.normalize();
    const std::vector<double> at{0.3 - dt, 0.3, 0.3 + dt};
    const auto s = evolve(w, h, 0.3 + dt, dt, at);
    const HydroFields a = decompose(s[0], Boundary::dirichlet_zero);
    const HydroFields b = decompose(s[1], Boundary::dirichlet_zero);
    const HydroFields c = decompose(s[2], Boundary::dirichlet_zero);
    const RealField hj = hamilton_jacobi_residual(a, b, c, spec, dt);
    const RealField ct = continuity_residual(a, b, c, spec, dt);
    return std::pair{max_off(hj, [](double) { return 0.0; }, 3.0), max_off(ct, [](double) { return 0.0; }, 3.0)};
  };
  const auto coarse = residual(500, 0.01);
  const auto fine = residual(1000, 0.005);
  CHECK(coarse.first <= 2e-2);
  CHECK(coarse.second <= 2e-2);
  CHECK(coarse.first / fine.first > 3.0);
  CHECK(coarse.second / fine.second > 3.0);
}

TEST_CASE("quantum potential of a gaussian") {
  // R = exp(-q^2 / 4 s^2): Q = -(1/2m) R''/R = -(1/2m) (q^2 / 4 s^4 - 1 / 2 s^2)
  const SpatialGrid g = SpatialGrid::line(-8.0, 8.0, 1600);
  const double s2 = 1.0;
  const HydroFields h = decompose(from_fields(g, [&](double q) { return std::exp(-q * q / (2.0 * s2)); },
                                              [](double) { return 0.0; }),
                                  Boundary::dirichlet_zero);
  const RealField qp = quantum_potential(h, HamiltonianSpec::free_particle(1.0));
  CHECK(max_off(qp, [&](double q) { return -0.5 * (q * q / (4.0 * s2 * s2) - 1.0 / (2.0 * s2)); }, 3.0) <= 1e-3);
}
