#include "stochaction/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "stochaction/differential.hpp"

namespace stochaction {

namespace {

std::vector<std::size_t> alive_indices(const EnsembleSnapshot& snap) {
  std::vector<std::size_t> idx;
  idx.reserve(snap.positions.size());
  for (std::size_t i = 0; i < snap.positions.size(); ++i) {
    if (snap.alive[i]) idx.push_back(i);
  }
  if (idx.empty()) throw ConfigurationError("statistics", "empty ensemble");
  return idx;
}

void require_momenta(const EnsembleSnapshot& snap) {
  if (snap.momenta.size() != snap.positions.size()) {
    throw ConfigurationError("statistics", "missing momentum records");
  }
}

void require_axis(const EnsembleSnapshot& snap, int axis) {
  if (axis < 0 || axis >= snap.state.psi.grid().dim()) throw ConfigurationError("statistics", "axis out of range");
}

// -i lambda D psi along `axis`.
ComplexField momentum_apply(const ComplexField& psi, Boundary boundary, double lambda, int axis) {
  ComplexField d = gradient(psi, boundary, axis);
  for (Complex& v : d.values()) v *= Complex{0.0, -lambda};
  return d;
}

ObservableReport make_report(std::string name, const Estimate& e, double quantum, const EnsembleSnapshot& snap) {
  ObservableReport r;
  r.name = std::move(name);
  r.ensemble = e.value;
  r.mc_err = e.error;
  r.quantum = quantum;
  r.z = z_score(e.value, quantum, e.error);
  r.n = e.n;
  r.time = snap.time;
  return r;
}

template <class F>
std::vector<double> gather(const std::vector<std::size_t>& idx, F&& f) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(f(i));
  return out;
}

double sum_span(std::span<const double> xs) {
  // Pairwise summation keeps the result independent of how the caller
  // partitioned the work and limits rounding growth.
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return sum_span(xs.first(half)) + sum_span(xs.subspan(half));
}

}  // namespace

Estimate batch_mean(std::span<const double> xs, std::size_t batches) {
  Estimate e;
  e.n = xs.size();
  if (xs.empty()) throw ConfigurationError("statistics", "empty ensemble");
  e.value = sum_span(xs) / static_cast<double>(xs.size());
  if (xs.size() == 1) return e;
  double var = 0.0;
  if (xs.size() >= 2 * batches) {
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t lo = xs.size() * b / batches;
      const std::size_t hi = xs.size() * (b + 1) / batches;
      const double m = sum_span(xs.subspan(lo, hi - lo)) / static_cast<double>(hi - lo);
      var += (m - e.value) * (m - e.value);
    }
    e.error = std::sqrt(var / static_cast<double>(batches - 1) / static_cast<double>(batches));
  } else {
    for (double x : xs) var += (x - e.value) * (x - e.value);
    e.error = std::sqrt(var / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  const double floor = std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(e.value));
  e.error = std::max(e.error, floor);
  return e;
}

Estimate batch_statistic(std::size_t n, const std::function<double(std::size_t, std::size_t)>& stat,
                         std::size_t batches) {
  if (n < 2 * batches) throw ConfigurationError("statistics", "too few samples for batch statistics");
  Estimate e;
  e.n = n;
  e.value = stat(0, n);
  std::vector<double> values(batches);
  for (std::size_t b = 0; b < batches; ++b) values[b] = stat(n * b / batches, n * (b + 1) / batches);
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(batches);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  e.error = std::sqrt(var / static_cast<double>(batches - 1) / static_cast<double>(batches));
  e.error = std::max(e.error, std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(e.value)));
  return e;
}

double z_score(double ensemble, double quantum, double mc_err) {
  const double diff = std::abs(ensemble - quantum);
  if (mc_err > 0.0) return diff / mc_err;
  return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

nlohmann::json to_json(const ObservableReport& r) {
  return {{"name", r.name},       {"ensemble", r.ensemble}, {"mc_err", r.mc_err}, {"quantum", r.quantum},
          {"z", r.z},             {"n", r.n},               {"time", r.time},     {"quantum_imag", r.quantum_imag}};
}

void write_reports_csv(std::ostream& os, const std::vector<ObservableReport>& reports) {
  os << std::setprecision(12);
  os << "observable,ensemble,mc_err,quantum,z,n,time\n";
  for (const auto& r : reports) {
    os << r.name << ',' << r.ensemble << ',' << r.mc_err << ',' << r.quantum << ',' << r.z << ',' << r.n << ','
       << r.time << '\n';
  }
}

ObservableReport mean_position_function(const EnsembleSnapshot& snap, const std::function<double(const Point&)>& f,
                                        const std::string& name) {
  const auto idx = alive_indices(snap);
  const auto xs = gather(idx, [&](std::size_t i) { return f(snap.positions[i]); });
  const SpatialGrid& g = snap.hydro.grid();
  double quantum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) quantum += f(g.point(i)) * snap.hydro.rho[i];
  return make_report(name, batch_mean(xs), quantum * g.cell_volume(), snap);
}

ObservableReport position_variance(const EnsembleSnapshot& snap, int axis) {
  require_axis(snap, axis);
  const auto idx = alive_indices(snap);
  const auto a = static_cast<std::size_t>(axis);
  const auto xs = gather(idx, [&](std::size_t i) { return snap.positions[i][a]; });
  const Estimate var = batch_statistic(xs.size(), [&](std::size_t lo, std::size_t hi) {
    const auto part = std::span<const double>(xs).subspan(lo, hi - lo);
    const double m = sum_span(part) / static_cast<double>(part.size());
    double s = 0.0;
    for (double x : part) s += (x - m) * (x - m);
    return s / static_cast<double>(part.size() - 1);
  });
  const QuantumMoments qm = quantum_moments(snap.state, snap.hydro.boundary, axis);
  return make_report("var_q" + std::string(axis ? "_y" : ""), var, qm.var_q, snap);
}

ObservableReport mean_momentum(const EnsembleSnapshot& snap, int axis) {
  require_axis(snap, axis);
  require_momenta(snap);
  const auto idx = alive_indices(snap);
  const auto a = static_cast<std::size_t>(axis);
  const auto ps = gather(idx, [&](std::size_t i) { return snap.momenta[i][a]; });
  const Complex q = inner_product(
      snap.state.psi, momentum_apply(snap.state.psi, snap.hydro.boundary, snap.state.lambda_mag, axis));
  ObservableReport r = make_report(axis ? "p_y" : "p", batch_mean(ps), q.real(), snap);
  r.quantum_imag = q.imag();
  return r;
}

ObservableReport mean_osmotic_momentum(const EnsembleSnapshot& snap, int axis) {
  require_axis(snap, axis);
  require_momenta(snap);
  const auto idx = alive_indices(snap);
  const auto a = static_cast<std::size_t>(axis);
  const auto us = gather(idx, [&](std::size_t i) { return snap.osmotic_momenta[i][a]; });
  return make_report("osmotic_p", batch_mean(us), 0.0, snap);
}

ObservableReport mean_quadratic_momentum(const EnsembleSnapshot& snap, double d, int axis) {
  require_axis(snap, axis);
  require_momenta(snap);
  const auto idx = alive_indices(snap);
  const auto a = static_cast<std::size_t>(axis);
  const auto xs = gather(idx, [&](std::size_t i) {
    const double k = snap.momenta[i][a] - d;
    return k * k;
  });
  ComplexField shifted = momentum_apply(snap.state.psi, snap.hydro.boundary, snap.state.lambda_mag, axis);
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] -= d * snap.state.psi[i];
  const double n = norm(shifted);
  return make_report("p2_shift", batch_mean(xs), n * n, snap);
}

ObservableReport mean_energy(const EnsembleSnapshot& snap, const HamiltonianSpec& spec) {
  require_momenta(snap);
  const auto idx = alive_indices(snap);
  const auto es = gather(idx, [&](std::size_t i) { return spec.energy(snap.positions[i], snap.momenta[i]); });
  const DiscreteHamiltonian h =
      DiscreteHamiltonian::build(spec, snap.state.psi.grid(), snap.hydro.boundary, snap.state.lambda_mag);
  return make_report("energy", batch_mean(es), h.expectation(snap.state.psi), snap);
}

ObservableReport mean_angular_momentum_2d(const EnsembleSnapshot& snap) {
  const SpatialGrid& g = snap.state.psi.grid();
  if (g.dim() != 2) throw ConfigurationError("statistics", "angular momentum needs a 2D scenario");
  require_momenta(snap);
  const auto idx = alive_indices(snap);
  const auto ls = gather(idx, [&](std::size_t i) {
    const Point& q = snap.positions[i];
    const Point& p = snap.momenta[i];
    return q[0] * p[1] - q[1] * p[0];
  });
  const double lambda = snap.state.lambda_mag;
  const ComplexField px = momentum_apply(snap.state.psi, snap.hydro.boundary, lambda, 0);
  const ComplexField py = momentum_apply(snap.state.psi, snap.hydro.boundary, lambda, 1);
  ComplexField l(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point q = g.point(i);
    l[i] = q[0] * py[i] - q[1] * px[i];
  }
  const Complex value = inner_product(snap.state.psi, l);
  ObservableReport r = make_report("angular_momentum", batch_mean(ls), value.real(), snap);
  r.quantum_imag = value.imag();
  return r;
}

MomentumSplitReport momentum_split(const EnsembleSnapshot& snap, int axis) {
  require_axis(snap, axis);
  require_momenta(snap);
  const auto idx = alive_indices(snap);
  const auto a = static_cast<std::size_t>(axis);
  MomentumSplitReport r;
  const auto s2 = gather(idx, [&](std::size_t i) {
    const double s = snap.momenta[i][a] - snap.osmotic_momenta[i][a];
    return s * s;
  });
  const auto u2 = gather(idx, [&](std::size_t i) { return snap.osmotic_momenta[i][a] * snap.osmotic_momenta[i][a]; });
  const auto cross = gather(idx, [&](std::size_t i) {
    const double u = snap.osmotic_momenta[i][a];
    return 2.0 * (snap.momenta[i][a] - u) * u;
  });
  r.phase_part = batch_mean(s2);
  r.osmotic_part = batch_mean(u2);
  r.cross_term = batch_mean(cross);
  r.cross_z = z_score(r.cross_term.value, 0.0, r.cross_term.error);
  return r;
}

double quantum_p3(const WaveFunction& psi, Boundary boundary) {
  const ComplexField p1 = momentum_apply(psi.psi, boundary, psi.lambda_mag, 0);
  const ComplexField p2 = momentum_apply(p1, boundary, psi.lambda_mag, 0);
  const ComplexField p3 = momentum_apply(p2, boundary, psi.lambda_mag, 0);
  return inner_product(psi.psi, p3).real();
}

double model_p3(const HydroFields& h) {
  double acc = 0.0;
  for (std::size_t i = 0; i < h.rho.size(); ++i) {
    if (h.node_mask[i]) continue;
    const double s = h.s_grad[0][i];
    const double u = 0.5 * h.lambda_mag * h.log_rho_grad[0][i];
    acc += h.rho[i] * (s * s * s + 3.0 * s * u * u);
  }
  return acc * h.grid().cell_volume();
}

DiscrepancyReport p3_discrepancy(const EnsembleSnapshot& snap) {
  require_momenta(snap);
  if (snap.state.psi.grid().dim() != 1) throw ConfigurationError("statistics", "p^3 check is one-dimensional");
  const auto idx = alive_indices(snap);
  const auto xs = gather(idx, [&](std::size_t i) {
    const double p = snap.momenta[i][0];
    return p * p * p;
  });
  const Estimate e = batch_mean(xs);
  DiscrepancyReport r;
  r.ensemble = e.value;
  r.mc_err = e.error;
  r.n = e.n;
  r.time = snap.time;
  r.quantum = quantum_p3(snap.state, snap.hydro.boundary);
  r.model_quadrature = model_p3(snap.hydro);
  r.z_gap = z_score(r.ensemble, r.quantum, r.mc_err);
  r.z_model = z_score(r.ensemble, r.model_quadrature, r.mc_err);
  r.inconclusive = !(r.z_gap >= 5.0);
  return r;
}

nlohmann::json to_json(const DiscrepancyReport& r) {
  return {{"ensemble", r.ensemble},   {"mc_err", r.mc_err},   {"quantum", r.quantum},
          {"model_quadrature", r.model_quadrature},           {"z_gap", r.z_gap},
          {"z_model", r.z_model},     {"inconclusive", r.inconclusive},
          {"n", r.n},                 {"time", r.time}};
}

UncertaintyReport uncertainty_report(const EnsembleSnapshot& snap, int axis) {
  require_axis(snap, axis);
  require_momenta(snap);
  const auto idx = alive_indices(snap);
  const auto a = static_cast<std::size_t>(axis);
  const auto qs = gather(idx, [&](std::size_t i) { return snap.positions[i][a]; });
  const auto ps = gather(idx, [&](std::size_t i) { return snap.momenta[i][a]; });
  const auto us = gather(idx, [&](std::size_t i) { return snap.osmotic_momenta[i][a]; });
  const double bound = 0.25 * snap.state.lambda_mag * snap.state.lambda_mag;

  auto variance = [](std::span<const double> xs) {
    const double m = sum_span(xs) / static_cast<double>(xs.size());
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
  };
  auto mean_square = [](std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x * x;
    return s / static_cast<double>(xs.size());
  };
  auto part = [](const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    return std::span<const double>(v).subspan(lo, hi - lo);
  };

  const std::size_t n = qs.size();
  const Estimate qu = batch_statistic(n, [&](std::size_t lo, std::size_t hi) {
    return variance(part(qs, lo, hi)) * mean_square(part(us, lo, hi));
  });
  const Estimate qp = batch_statistic(n, [&](std::size_t lo, std::size_t hi) {
    return variance(part(qs, lo, hi)) * variance(part(ps, lo, hi));
  });
  const Estimate pu = batch_statistic(n, [&](std::size_t lo, std::size_t hi) {
    return variance(part(ps, lo, hi)) - mean_square(part(us, lo, hi));
  });

  auto check = [](std::string name, const Estimate& e, double b) {
    return InequalityCheck{std::move(name), e.value, e.error, b, e.value >= b - 4.0 * e.error};
  };
  UncertaintyReport r;
  r.position_osmotic = check("var_q*osmotic2>=lambda^2/4", qu, bound);
  r.position_momentum = check("var_q*var_p>=lambda^2/4", qp, bound);
  r.momentum_osmotic = check("var_p-osmotic2>=0", pu, 0.0);
  r.var_q = variance(qs);
  r.var_p = variance(ps);
  const QuantumMoments qm = quantum_moments(snap.state, snap.hydro.boundary, axis);
  r.quantum_product = qm.var_q * qm.var_p;
  r.n = n;
  r.time = snap.time;
  return r;
}

nlohmann::json to_json(const UncertaintyReport& r) {
  auto one = [](const InequalityCheck& c) {
    return nlohmann::json{{"name", c.name}, {"value", c.value}, {"mc_err", c.mc_err}, {"bound", c.bound},
                          {"holds", c.holds}};
  };
  return {{"position_osmotic", one(r.position_osmotic)},
          {"position_momentum", one(r.position_momentum)},
          {"momentum_osmotic", one(r.momentum_osmotic)},
          {"var_q", r.var_q},
          {"var_p", r.var_p},
          {"quantum_product", r.quantum_product},
          {"n", r.n},
          {"time", r.time}};
}

QuantumMoments quantum_moments(const WaveFunction& psi, Boundary boundary, int axis) {
  const SpatialGrid& g = psi.psi.grid();
  const auto a = static_cast<std::size_t>(axis);
  QuantumMoments m;
  double q1 = 0.0;
  double q2 = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = std::norm(psi.psi[i]);
    const double x = g.point(i)[a];
    mass += r;
    q1 += r * x;
    q2 += r * x * x;
  }
  m.mean_q = q1 / mass;
  m.var_q = q2 / mass - m.mean_q * m.mean_q;
  const ComplexField p = momentum_apply(psi.psi, boundary, psi.lambda_mag, axis);
  m.mean_p = inner_product(psi.psi, p).real();
  ComplexField shifted = p;
  for (std::size_t i = 0; i < g.size(); ++i) shifted[i] -= m.mean_p * psi.psi[i];
  const double n = norm(shifted);
  m.var_p = n * n;
  return m;
}

}  // namespace stochaction
