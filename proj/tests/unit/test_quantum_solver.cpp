#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"

#include "stochaction/differential.hpp"
#include "stochaction/quantum_solver.hpp"
#include "stochaction/rng.hpp"

using namespace stochaction;

namespace {

WaveFunction gaussian(const SpatialGrid& g, double mu, double sigma, double p0) {
  WaveFunction w;
  w.psi = ComplexField::sample(g, [&](const Point& q) {
    const double x = q[0] - mu;
    return std::exp(Complex{-x * x / (4.0 * sigma * sigma), p0 * x});
  });
  w.normalize();
  return w;
}

ComplexField random_field(const SpatialGrid& g, std::uint64_t seed) {
  RngStream rng(seed, 0, StreamPurpose::test);
  ComplexField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = {rng.uniform() - 0.5, rng.uniform() - 0.5};
  return f;
}

}  // namespace

TEST_CASE("free hamiltonian reduces to the three-point stencil") {
  const SpatialGrid g = SpatialGrid::line(-5.0, 5.0, 100);
  auto spec = HamiltonianSpec::harmonic(2.0, 1.0);
  const auto h = DiscreteHamiltonian::build(spec, g, Boundary::dirichlet_zero, 1.0);
  const ComplexField psi = gaussian(g, 0.3, 1.0, 0.5).psi;
  const ComplexField hp = h.apply(psi);
  const double dx = g.spacing(0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Complex left = i > 0 ? psi[i - 1] : Complex{};
    const Complex right = i + 1 < g.size() ? psi[i + 1] : Complex{};
    const double q = g.point(i)[0];
    const Complex expect = -(1.0 / 4.0) * (left - 2.0 * psi[i] + right) / (dx * dx) + q * q * psi[i];
    CHECK(std::abs(hp[i] - expect) <= 1e-12);
  }
}

TEST_CASE("discrete hamiltonian is hermitian") {
  const SpatialGrid g = SpatialGrid::line(-4.0, 4.0, 64);
  HamiltonianSpec spec = HamiltonianSpec::harmonic(1.0, 1.5);
  spec.position_metric = [](double q) { return 1.0 + 0.1 * q * q; };
  spec.vector_potential = [](const Point& q) { return Point{0.3 * q[0], 0.0}; };
  for (Boundary b : {Boundary::dirichlet_zero, Boundary::periodic}) {
    const auto h = DiscreteHamiltonian::build(spec, g, b, 0.7);
    const ComplexField phi = random_field(g, 1), psi = random_field(g, 2);
    const Complex a = inner_product(phi, h.apply(psi));
    const Complex c = std::conj(inner_product(psi, h.apply(phi)));
    CHECK(std::abs(a - c) <= 1e-10 * norm(phi) * norm(psi));
  }

  const SpatialGrid p = SpatialGrid::plane({-2.0, 2.0, 12}, {-2.0, 2.0, 10});
  HamiltonianSpec s2 = HamiltonianSpec::free_particle(1.0, 2);
  s2.vector_potential = [](const Point& q) { return Point{-0.5 * q[1], 0.5 * q[0]}; };
  const auto h2 = DiscreteHamiltonian::build(s2, p, Boundary::dirichlet_zero, 1.0);
  const ComplexField phi = random_field(p, 3), psi = random_field(p, 4);
  CHECK(std::abs(inner_product(phi, h2.apply(psi)) - std::conj(inner_product(psi, h2.apply(phi)))) <= 1e-10);
}

TEST_CASE("crank-nicolson is unitary and conserves energy") {
  const SpatialGrid g = SpatialGrid::line(-20.0, 20.0, 1024);
  const auto spec = HamiltonianSpec::harmonic(1.0, 0.5);
  const auto h = DiscreteHamiltonian::build(spec, g, Boundary::dirichlet_zero, 1.0);
  const CrankNicolson cn(h, 0.01);
  WaveFunction w = gaussian(g, 2.0, 1.0, 1.0);
  const double e0 = h.expectation(w.psi);
  double step_drift = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double before = w.norm();
    cn.step_in_place(w);
    step_drift = std::max(step_drift, std::abs(w.norm() - before));
  }
  CHECK(step_drift <= 1e-10);
  CHECK(std::abs(h.expectation(w.psi) - e0) <= 1e-8);
  CHECK(w.time == doctest::Approx(10.0));
}

TEST_CASE("periodic crank-nicolson") {
  const SpatialGrid g = SpatialGrid::line(0.0, 2.0 * std::numbers::pi, 256);
  const auto h = DiscreteHamiltonian::build(HamiltonianSpec::free_particle(1.0), g, Boundary::periodic, 1.0);
  WaveFunction w;
  w.psi = ComplexField::sample(g, [](const Point& q) { return std::exp(Complex{0.0, 3.0 * q[0]}); });
  w.normalize();
  const WaveFunction start = w;
  const CrankNicolson cn(h, 0.01);
  for (int k = 0; k < 100; ++k) cn.step_in_place(w);
  CHECK(std::abs(w.norm() - 1.0) <= 1e-12);
  // a plane wave only picks up a phase
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(std::abs(w.psi[i]) - std::abs(start.psi[i])) <= 1e-12);
}

TEST_CASE("evolution is linear and schedule independent") {
  const SpatialGrid g = SpatialGrid::line(-10.0, 10.0, 400);
  const auto h = DiscreteHamiltonian::build(HamiltonianSpec::harmonic(1.0, 1.0), g, Boundary::dirichlet_zero, 1.0);
  const WaveFunction a = gaussian(g, -1.0, 0.7, 0.0), b = gaussian(g, 2.0, 1.0, -1.0);
  const Complex alpha{0.6, 0.2}, beta{-0.3, 0.5};
  WaveFunction mix = a;
  for (std::size_t i = 0; i < g.size(); ++i) mix.psi[i] = alpha * a.psi[i] + beta * b.psi[i];
  const std::vector<double> at{0.5};
  const WaveFunction ea = evolve(a, h, 0.5, 0.01, at).back();
  const WaveFunction eb = evolve(b, h, 0.5, 0.01, at).back();
  const WaveFunction em = evolve(mix, h, 0.5, 0.01, at).back();
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(em.psi[i] - alpha * ea.psi[i] - beta * eb.psi[i]));
  CHECK(err <= 1e-10);

  const std::vector<double> s1{0.5}, s2{0.1, 0.2, 0.5};
  const WaveFunction x = evolve(a, h, 0.5, 0.01, s1).back();
  const WaveFunction y = evolve(a, h, 0.5, 0.01, s2).back();
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(x.psi[i] == y.psi[i]);

  const std::vector<double> zero{0.0};
  const WaveFunction z = evolve(a, h, 0.0, 0.01, zero).front();
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(z.psi[i] == a.psi[i]);

  CHECK_THROWS_AS(steps_for(0.5, 0.03), ConfigurationError);
  CHECK(steps_for(0.5, 0.01) == 50);
}

TEST_CASE("free gaussian spreading") {
  // sigma(t)^2 = sigma0^2 (1 + (t / 2 m sigma0^2)^2) with hbar = 1
  const SpatialGrid g = SpatialGrid::line(-30.0, 30.0, 3000);
  const double m = 2.0, s0 = 0.8;
  const auto h = DiscreteHamiltonian::build(HamiltonianSpec::free_particle(m), g, Boundary::dirichlet_zero, 1.0);
  const std::vector<double> at{1.0, 2.0, 4.0};
  const auto states = evolve(gaussian(g, 0.0, s0, 0.0), h, 4.0, 0.005, at);
  for (const WaveFunction& w : states) {
    double v = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) v += std::norm(w.psi[i]) * std::pow(g.point(i)[0], 2) * g.cell_volume();
    const double tau = w.time / (2.0 * m * s0 * s0);
    CHECK(v == doctest::Approx(s0 * s0 * (1.0 + tau * tau)).epsilon(1e-3));
  }
}

TEST_CASE("oscillator ground state is stationary") {
  const SpatialGrid g = SpatialGrid::line(-10.0, 10.0, 1024);
  const auto h = DiscreteHamiltonian::build(HamiltonianSpec::harmonic(1.0, 1.0), g, Boundary::dirichlet_zero, 1.0);
  WaveFunction guess;
  guess.psi = ComplexField::sample(g, [](const Point& q) { return Complex{std::exp(-q[0] * q[0] / 2.0), 0.0}; });
  guess.normalize();
  const WaveFunction ground = refine_eigenstate(h, guess, 0.5);
  CHECK(h.expectation(ground.psi) == doctest::Approx(0.5).epsilon(1e-4));
  const std::vector<double> at{1.0};
  const WaveFunction later = evolve(ground, h, 1.0, 0.002, at).back();
  double amp = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) amp = std::max(amp, std::abs(std::abs(later.psi[i]) - std::abs(ground.psi[i])));
  CHECK(amp <= 1e-6);
  CHECK(std::arg(inner_product(ground.psi, later.psi)) == doctest::Approx(-0.5).epsilon(2e-3));
}

TEST_CASE("ordering identity converges to lambda squared") {
  for (double lambda : {1.0, 0.5}) {
    double errs[2];
    int k = 0;
    for (std::size_t n : {1000u, 2000u}) {
      const SpatialGrid g = SpatialGrid::line(-10.0, 10.0, n);
      const ComplexField psi = ComplexField::sample(g, [](const Point& q) {
        return (1.0 + q[0]) * std::exp(Complex{-q[0] * q[0] / 2.0, 0.5 * q[0]});
      });
      const ComplexField d = sandwich_ordering_difference(psi, [](double q) { return q * q; }, Boundary::dirichlet_zero,
                                                          lambda);
      double e = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(g.point(i)[0]) < 6.0) e = std::max(e, std::abs(d[i] - lambda * lambda * psi[i]));
      }
      errs[k++] = e;
    }
    CHECK(errs[1] <= 1e-3);
    CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("wavefunction csv") {
  const SpatialGrid g = SpatialGrid::line(0.0, 1.0, 8);
  WaveFunction w;
  w.psi = ComplexField(g, Complex{1.0, -2.0});
  std::ostringstream os;
  write_wavefunction_csv(os, w);
  const std::string s = os.str();
  CHECK(s.rfind("q,re,im\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 9);
}
