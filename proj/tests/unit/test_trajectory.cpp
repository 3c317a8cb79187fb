#include <cmath>
#include <numbers>

#include "doctest.h"

#include "stochaction/distribution.hpp"
#include "stochaction/trajectory.hpp"

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

EnsembleConfig free_config(std::size_t n, double t_final, double dt) {
  EnsembleConfig c;
  c.spec = HamiltonianSpec::free_particle(1.0);
  c.params.lambda_mag = 1.0;
  c.params.dt_step = dt;
  c.params.seed = 17;
  c.t_final = t_final;
  c.snapshot_times = {0.0, t_final};
  c.trajectories = n;
  c.workers = 1;
  return c;
}

}  // namespace

TEST_CASE("initial sampling") {
  const SpatialGrid g = SpatialGrid::line(0.0, 1.0, 100);
  const auto u = sample_initial(RealField(g, 1.0), 100000, 3);
  std::vector<double> xs;
  for (const Point& p : u) xs.push_back(p[0]);
  CHECK(ks_one_sample(xs, [](double x) { return std::clamp(x, 0.0, 1.0); }).statistic <= 1.63 / std::sqrt(1e5));

  const SpatialGrid line = SpatialGrid::line(-10.0, 10.0, 1000);
  const RealField rho = RealField::sample(line, [](const Point& q) { return std::exp(-(q[0] - 1.0) * (q[0] - 1.0) / 2.0); });
  const auto s = sample_initial(rho, 100000, 4);
  double m = 0.0, v = 0.0;
  for (const Point& p : s) m += p[0];
  m /= s.size();
  for (const Point& p : s) v += (p[0] - m) * (p[0] - m);
  v /= s.size();
  const double cell = line.spacing(0);
  CHECK(std::abs(m - 1.0) <= 4.0 / std::sqrt(1e5));
  CHECK(std::abs(v - (1.0 + cell * cell / 12.0)) <= 4.0 * std::sqrt(2.0 / 1e5));

  RealField hot(line, 0.0);
  hot[321] = 1.0;
  const auto one = sample_initial(hot, 1, 5);
  CHECK(containing_cell(line, one[0]) == 321);
}

TEST_CASE("single steps") {
  const SpatialGrid g = SpatialGrid::line(0.0, 2.0 * std::numbers::pi, 256);
  WaveFunction plane;
  plane.psi = ComplexField::sample(g, [](const Point& q) { return std::exp(Complex{0.0, 2.0 * q[0]}); });
  const HydroFields hp = decompose(plane, Boundary::periodic);
  const auto fields = AdvectionFields::from(plane, hp, HamiltonianSpec::free_particle(1.0));
  const double v = hp.s_grad[0][0];
  for (int sign : {1, -1}) {
    ParticleState st{{1.0, 0.0}, sign, false};
    RngStream rng(1, 0, StreamPurpose::sign_flip);
    advance(st, fields, 0.5, rng, 0.01);
    CHECK(st.position[0] == doctest::Approx(1.0 + v * 0.01).epsilon(1e-12));
  }

  // flip_prob 0, sign +1 on a resting gaussian: velocity (lambda/2m) d rho / rho = -(q - mu) / 2 sigma^2
  const SpatialGrid line = SpatialGrid::line(-10.0, 10.0, 2000);
  const WaveFunction rest = gaussian(line, 0.0, 1.0, 0.0);
  const HydroFields hg = decompose(rest, Boundary::dirichlet_zero);
  const auto gf = AdvectionFields::from(rest, hg, HamiltonianSpec::free_particle(1.0));
  ParticleState st{{1.0, 0.0}, 1, false};
  RngStream rng(2, 0, StreamPurpose::sign_flip);
  advance(st, gf, 0.0, rng, 0.01);
  CHECK(st.sign == 1);
  CHECK(st.position[0] == doctest::Approx(1.0 - 0.5 * 0.01).epsilon(1e-5));
  ParticleState bs{{1.0, 0.0}, 1, false};
  advance_bohmian(bs, gf, 0.01);
  CHECK(bs.position[0] == doctest::Approx(1.0));

  ParticleState out{{9.999, 0.0}, -1, false};
  const WaveFunction fast = gaussian(line, 0.0, 1.0, 200.0);
  const HydroFields hb = decompose(fast, Boundary::dirichlet_zero);
  advance_bohmian(out, AdvectionFields::from(fast, hb, HamiltonianSpec::free_particle(1.0)), 0.01);
  CHECK(out.terminated);
  CHECK(out.position[0] == doctest::Approx(9.999));
}

TEST_CASE("reference paths") {
  const SpatialGrid g = SpatialGrid::line(-20.0, 20.0, 2000);
  EnsembleConfig c = free_config(0, 2.0, 0.005);
  const WaveFunction w = gaussian(g, 0.0, 1.0, 0.0);
  const ReferencePath p = bohmian_reference(c, w, {1.0, 0.0});
  // q(t) = q0 sigma(t) / sigma0 with sigma(t) = sqrt(1 + t^2 / 4)
  for (std::size_t k = 0; k < p.times.size(); k += 100) {
    CHECK(p.positions[k][0] == doctest::Approx(std::sqrt(1.0 + p.times[k] * p.times[k] / 4.0)).epsilon(5e-3));
  }

  EnsembleConfig osc = c;
  osc.spec = HamiltonianSpec::harmonic(1.0, 1.0);
  WaveFunction ground;
  ground.psi = ComplexField::sample(g, [](const Point& q) { return Complex{std::exp(-q[0] * q[0] / 2.0), 0.0}; });
  ground.normalize();
  const ReferencePath s = bohmian_reference(osc, ground, {0.7, 0.0});
  CHECK(s.positions.back()[0] == doctest::Approx(0.7).epsilon(1e-4));

  const ReferencePath line = classical_path(HamiltonianSpec::free_particle(2.0), g, {0.0, 0.0}, {3.0, 0.0}, 1.0, 0.01);
  CHECK(line.positions.back()[0] == doctest::Approx(1.5).epsilon(1e-12));
  const ReferencePath cosine = classical_path(HamiltonianSpec::harmonic(1.0, 1.0), g, {1.0, 0.0}, {0.0, 0.0}, 1.0, 0.01);
  CHECK(cosine.positions.back()[0] == doctest::Approx(std::cos(1.0)).epsilon(1e-6));
}

TEST_CASE("ensemble determinism and bookkeeping") {
  const SpatialGrid g = SpatialGrid::line(-15.0, 15.0, 600);
  const WaveFunction w = gaussian(g, 0.0, 1.0, 0.5);
  EnsembleConfig c = free_config(5000, 1.0, 0.01);
  const EnsembleResult a = run_ensemble(c, w);
  c.workers = 3;
  const EnsembleResult b = run_ensemble(c, w);
  REQUIRE(a.snapshots.size() == 2);
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    CHECK(a.snapshots[k].positions == b.snapshots[k].positions);
    CHECK(a.snapshots[k].signs == b.snapshots[k].signs);
  }
  CHECK(a.snapshots[0].alive_count() == 5000);

  EnsembleConfig empty = free_config(0, 1.0, 0.01);
  const EnsembleResult e = run_ensemble(empty, w);
  CHECK(e.snapshots.size() == 2);
  CHECK(e.snapshots[1].positions.empty());
  CHECK(e.snapshots[1].state.time == doctest::Approx(1.0));
}

TEST_CASE("equivariance and branch symmetry") {
  const SpatialGrid g = SpatialGrid::line(-20.0, 20.0, 1024);
  const WaveFunction w = gaussian(g, 0.0, 1.0, 0.0);
  EnsembleConfig c = free_config(40000, 1.0, 0.01);
  c.initial_sign = 1;
  const EnsembleResult plus = run_ensemble(c, w);
  c.initial_sign = -1;
  c.params.seed = 18;
  const EnsembleResult minus = run_ensemble(c, w);
  const auto& sp = plus.snapshots.back();
  const auto& sm = minus.snapshots.back();
  CHECK(equivariance_tv(sp, -6.0, 6.0, 64) <= 0.03);
  std::vector<double> a, b;
  for (const Point& p : sp.positions) a.push_back(p[0]);
  for (const Point& p : sm.positions) b.push_back(p[0]);
  CHECK(ks_two_sample(a, b).p_value > 0.01);

  // the branch terms cancel pairwise in the mean momentum
  double mean_p = 0.0;
  for (const Point& p : sp.momenta) mean_p += p[0];
  mean_p /= static_cast<double>(sp.momenta.size());
  CHECK(std::abs(mean_p) <= 0.02);
}

TEST_CASE("noise around the bohmian path scales like sqrt(dt)") {
  const SpatialGrid g = SpatialGrid::line(-20.0, 20.0, 1024);
  const WaveFunction w = gaussian(g, 0.0, 1.0, 0.0);
  std::vector<double> rms;
  for (double dt : {0.02, 0.005}) {
    EnsembleConfig c = free_config(3000, 1.0, dt);
    c.track_bohmian = true;
    const auto& s = run_ensemble(c, w).snapshots.back();
    double acc = 0.0;
    for (std::size_t i = 0; i < s.positions.size(); ++i) acc += std::pow(s.positions[i][0] - s.bohmian_positions[i][0], 2);
    rms.push_back(std::sqrt(acc / s.positions.size()));
  }
  CHECK(rms[0] / rms[1] == doctest::Approx(2.0).epsilon(0.3));
}
