#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "stochaction/action_model.hpp"
#include "stochaction/differential.hpp"
#include "stochaction/distribution.hpp"

using namespace stochaction;

TEST_CASE("infinitesimal action") {
  const SpatialGrid dom = SpatialGrid::line(-5.0, 5.0, 100);
  const auto free = HamiltonianSpec::free_particle(1.0);
  CHECK(infinitesimal_action({0.0, 0.0}, {1.0, 0.0}, 0.1, free, dom) == doctest::Approx(0.05));
  CHECK(infinitesimal_action({0.0, 0.0}, {0.0, 0.0}, 0.1, free, dom) == 0.0);
  const auto osc = HamiltonianSpec::harmonic(1.0, 1.0);
  CHECK(infinitesimal_action({1.0, 0.0}, {0.0, 0.0}, 0.1, osc, dom) == doctest::Approx(-0.05));
  CHECK_THROWS_AS(infinitesimal_action({7.0, 0.0}, {0.0, 0.0}, 0.1, free, dom), DomainError);
}

TEST_CASE("theta for simple phases") {
  const SpatialGrid g = SpatialGrid::line(-3.0, 3.0, 120);
  const auto spec = HamiltonianSpec::free_particle(2.0);

  const RealField plane = RealField::sample(g, [](const Point& q) { return 1.5 * q[0]; });
  const RealField t0 = theta_from_phase(plane, spec, Boundary::dirichlet_zero);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(std::abs(t0[i]) <= 1e-10);

  const double alpha = 0.8;
  const RealField quad = RealField::sample(g, [&](const Point& q) { return alpha * q[0] * q[0] / 2.0; });
  const RealField t1 = theta_from_phase(quad, spec, Boundary::dirichlet_zero);
  const RealField t2 = theta({gradient(quad, Boundary::dirichlet_zero)}, spec, Boundary::dirichlet_zero);
  for (std::size_t i = 2; i + 2 < g.size(); ++i) {
    CHECK(t1[i] == doctest::Approx(alpha / 2.0).epsilon(1e-9));
    CHECK(t2[i] == doctest::Approx(alpha / 2.0).epsilon(1e-9));
  }
}

TEST_CASE("theta decomposes for non-interacting pairs") {
  const SpatialGrid g = SpatialGrid::plane({-2.0, 2.0, 40}, {-2.0, 2.0, 40});
  auto spec = HamiltonianSpec::free_particle(1.0, 2);
  spec.inverse_mass = {1.0, 0.5};
  auto s1 = [](double x) { return 0.3 * x * x * x; };
  auto s2 = [](double y) { return std::sin(y); };
  const RealField phase = RealField::sample(g, [&](const Point& q) { return s1(q[0]) + s2(q[1]); });
  const RealField th = theta_from_phase(phase, spec, Boundary::dirichlet_zero);

  const SpatialGrid gx = SpatialGrid::line(-2.0, 2.0, 40);
  const RealField p1 = RealField::sample(gx, [&](const Point& q) { return s1(q[0]); });
  const RealField p2 = RealField::sample(gx, [&](const Point& q) { return s2(q[0]); });
  const RealField th1 = theta_from_phase(p1, HamiltonianSpec::free_particle(1.0), Boundary::dirichlet_zero);
  const RealField th2 = theta_from_phase(p2, HamiltonianSpec::free_particle(2.0), Boundary::dirichlet_zero);
  double err = 0.0;
  // boundary cells see the zero ghost values of the full phase
  for (std::size_t ix = 1; ix < 39; ++ix) {
    for (std::size_t iy = 1; iy < 39; ++iy) err = std::max(err, std::abs(th[g.flat_index(ix, iy)] - th1[ix] - th2[iy]));
  }
  CHECK(err <= 1e-10);
}

TEST_CASE("flux and velocity forms of theta agree to second order") {
  double errs[2];
  int k = 0;
  for (std::size_t n : {200u, 400u}) {
    const SpatialGrid g = SpatialGrid::line(-2.0, 2.0, n);
    HamiltonianSpec spec = HamiltonianSpec::free_particle(1.0);
    spec.position_metric = [](double q) { return 1.0 + 0.2 * q * q; };
    const RealField s = RealField::sample(g, [](const Point& q) { return std::sin(q[0]) + 0.1 * q[0] * q[0] * q[0]; });
    const RealField a = theta_from_phase(s, spec, Boundary::dirichlet_zero);
    const RealField b = theta({gradient(s, Boundary::dirichlet_zero)}, spec, Boundary::dirichlet_zero);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(g.point(i)[0]) < 1.8) e = std::max(e, std::abs(a[i] - b[i]));
    }
    errs[k++] = e;
  }
  CHECK(errs[1] < errs[0]);
  CHECK(std::log2(errs[0] / errs[1]) > 1.8);
}

TEST_CASE("exponential deviation sampler") {
  StochasticParams p;
  p.lambda_mag = 2.0;
  RngStream rng(11, 0, StreamPurpose::deviation);
  const std::size_t n = 1'000'000;
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const DeviationSample d = sample_deviation(p, 1, rng);
    CHECK_FALSE(d.value < 0.0);
    s1 += d.value;
    s2 += d.value * d.value;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  // mean lambda/2 = 1 with sd 1, variance lambda^2/4 = 1 with sd sqrt(8)
  CHECK(std::abs(mean - 1.0) <= 3.0 / std::sqrt(double(n)));
  CHECK(std::abs(var - 1.0) <= 3.0 * std::sqrt(8.0 / n));
}

TEST_CASE("deviation sign follows the branch") {
  StochasticParams p;
  p.lambda_mag = 1.0;
  RngStream a(3, 0, StreamPurpose::deviation), b(3, 1, StreamPurpose::deviation);
  std::vector<double> plus, minus;
  for (int i = 0; i < 100000; ++i) {
    const auto x = sample_deviation(p, 1, a);
    const auto y = sample_deviation(p, -1, b);
    CHECK(x.sign_branch == 1);
    CHECK(y.sign_branch == -1);
    CHECK(y.value <= 0.0);
    plus.push_back(x.value);
    minus.push_back(-y.value);
  }
  CHECK(ks_two_sample(plus, minus).p_value > 0.01);

  p.lambda_mag = 1e-8;
  RngStream c(3, 2, StreamPurpose::deviation);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) worst = std::max(worst, std::abs(sample_deviation(p, 1, c).value));
  CHECK(worst < 1e-6);
}

TEST_CASE("transition log density") {
  CHECK(transition_log_density(0.0, 0.0, 0.01, 1.0) == 0.0);
  CHECK(transition_log_density(0.5, 0.0, 0.01, 1.0) == doctest::Approx(-1.0));
  CHECK(std::isinf(transition_log_density(0.5, 0.0, 0.01, -1.0)));
  const double d1 = 0.3, d2 = 0.7, t1 = 0.2, t2 = -0.4, dt = 0.01, l = 1.3;
  CHECK(transition_log_density(d1 + d2, t1 + t2, dt, l) ==
        doctest::Approx(transition_log_density(d1, t1, dt, l) + transition_log_density(d2, t2, dt, l)).epsilon(1e-15));
}

TEST_CASE("factorization report") {
  StochasticParams p;
  p.lambda_mag = 1.0;
  p.dt_step = 0.01;
  p.seed = 5;
  const auto f = HamiltonianSpec::free_particle(1.0);
  const auto r = verify_factorization(f, f, p, 100000);
  CHECK(r.tv_joint <= 0.02);
  CHECK(r.tv_sweep_max <= 0.02);
  const auto again = verify_factorization(f, f, p, 100000);
  CHECK(again.tv_joint == r.tv_joint);
  CHECK(again.mean_abs_dev1 == r.mean_abs_dev1);
}
