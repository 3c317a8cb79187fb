#include "stochaction/madelung.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <limits>
#include <ostream>

#include "stochaction/differential.hpp"

namespace stochaction {

std::size_t HydroFields::masked_count() const {
  return static_cast<std::size_t>(std::count(node_mask.values().begin(), node_mask.values().end(), 1));
}

namespace {

// Multi-source BFS from the unmasked cells; every masked cell receives the
// index of its nearest (in grid steps) unmasked cell.
std::vector<std::size_t> nearest_unmasked(const MaskField& mask) {
  const SpatialGrid& g = mask.grid();
  constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> source(g.size(), unset);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!mask[i]) {
      source[i] = i;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for (int a = 0; a < g.dim(); ++a) {
      const std::size_t c = g.coordinate_index(i, a);
      const std::size_t s = g.stride(a);
      if (c > 0 && source[i - s] == unset) {
        source[i - s] = source[i];
        queue.push_back(i - s);
      }
      if (c + 1 < g.points(a) && source[i + s] == unset) {
        source[i + s] = source[i];
        queue.push_back(i + s);
      }
    }
  }
  return source;
}

bool near_mask(const MaskField& mask, std::size_t i, int reach) {
  const SpatialGrid& g = mask.grid();
  for (int a = 0; a < g.dim(); ++a) {
    const auto c = static_cast<long>(g.coordinate_index(i, a));
    const auto s = static_cast<long>(g.stride(a));
    for (int k = -reach; k <= reach; ++k) {
      const long cc = c + k;
      if (cc < 0 || cc >= static_cast<long>(g.points(a))) continue;
      if (mask[static_cast<std::size_t>(static_cast<long>(i) + k * s)]) return true;
    }
  }
  return false;
}

void require_1d_triple(const HydroFields& a, const HydroFields& b, const HydroFields& c, double dt) {
  if (b.dim() != 1) throw ConfigurationError("madelung", "residual checks are one-dimensional");
  require_same_grid(a.grid(), b.grid(), "madelung");
  require_same_grid(b.grid(), c.grid(), "madelung");
  if (!(dt > 0.0)) throw DomainError("madelung", "time step must be positive");
}

}  // namespace

HydroFields decompose(const WaveFunction& psi, Boundary boundary, std::optional<double> rho_eps) {
  const SpatialGrid& g = psi.psi.grid();
  HydroFields h;
  h.lambda_mag = psi.lambda_mag;
  h.time = psi.time;
  h.boundary = boundary;
  h.rho = RealField(g);
  double max_rho = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    h.rho[i] = std::norm(psi.psi[i]);
    max_rho = std::max(max_rho, h.rho[i]);
  }
  h.rho_eps = rho_eps.value_or(1e-12 * max_rho);
  h.node_mask = MaskField(g, 0);
  std::size_t masked = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(h.rho[i] >= h.rho_eps) || h.rho[i] == 0.0) {
      h.node_mask[i] = 1;
      ++masked;
    }
  }
  if (masked == g.size()) throw NumericalError("madelung", "degenerate state: every cell is a node");

  const std::vector<std::size_t> source = masked ? nearest_unmasked(h.node_mask) : std::vector<std::size_t>{};
  for (int a = 0; a < g.dim(); ++a) {
    const ComplexField d = gradient(psi.psi, boundary, a);
    RealField s(g);
    RealField l(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (h.node_mask[i]) continue;
      const Complex w = std::conj(psi.psi[i]) * d[i] / h.rho[i];
      s[i] = psi.lambda_mag * w.imag();
      l[i] = 2.0 * w.real();
    }
    for (std::size_t i = 0; i < g.size() && masked; ++i) {
      if (h.node_mask[i]) {
        s[i] = s[source[i]];
        l[i] = l[source[i]];
      }
    }
    h.s_grad.push_back(std::move(s));
    h.log_rho_grad.push_back(std::move(l));
  }
  return h;
}

VelocityField bohmian_velocity(const HydroFields& h, const HamiltonianSpec& spec) {
  VelocityField out;
  for (int a = 0; a < h.dim(); ++a) {
    RealField v(h.grid());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point q = h.grid().point(i);
      v[i] = spec.metric(q, a) * (h.s_grad[a][i] - spec.vector_potential_at(q, a));
    }
    out.push_back(std::move(v));
  }
  return out;
}

VelocityField osmotic_term(const HydroFields& h, double lambda_signed) {
  VelocityField out;
  for (int a = 0; a < h.dim(); ++a) {
    RealField u(h.grid());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = 0.5 * lambda_signed * h.log_rho_grad[a][i];
    out.push_back(std::move(u));
  }
  return out;
}

VelocityField actual_velocity(const HydroFields& h, const HamiltonianSpec& spec, int sign, double lambda_mag) {
  if (sign != 1 && sign != -1) throw ConfigurationError("madelung", "sign branch must be +1 or -1");
  VelocityField out;
  for (int a = 0; a < h.dim(); ++a) {
    RealField v(h.grid());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point q = h.grid().point(i);
      const double p = h.s_grad[a][i] + sign * 0.5 * lambda_mag * h.log_rho_grad[a][i];
      v[i] = spec.metric(q, a) * (p - spec.vector_potential_at(q, a));
    }
    out.push_back(std::move(v));
  }
  return out;
}

RealField quantum_potential(const HydroFields& h, const HamiltonianSpec& spec) {
  const SpatialGrid& g = h.grid();
  RealField r(g);
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = std::sqrt(h.rho[i]);
  RealField out(g);
  for (int a = 0; a < g.dim(); ++a) {
    const RealField w = RealField::sample(g, [&](const Point& q) { return spec.metric(q, a); });
    const RealField flux = laplacian_weighted(r, w, h.boundary, a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!h.node_mask[i]) out[i] -= 0.5 * h.lambda_mag * h.lambda_mag * flux[i] / r[i];
    }
  }
  return out;
}

RealField hamilton_jacobi_residual(const HydroFields& before, const HydroFields& now, const HydroFields& after,
                                   const HamiltonianSpec& spec, double dt) {
  require_1d_triple(before, now, after, dt);
  const SpatialGrid& g = now.grid();
  const RealField q_pot = quantum_potential(now, spec);
  RealField energy(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point q = g.point(i);
    const double k = now.s_grad[0][i] - spec.vector_potential_at(q, 0);
    energy[i] = 0.5 * spec.metric(q, 0) * k * k + spec.potential_at(q) + q_pot[i];
  }
  const RealField force = gradient(energy, now.boundary, 0);
  RealField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (near_mask(now.node_mask, i, 2) || near_mask(before.node_mask, i, 2) || near_mask(after.node_mask, i, 2)) {
      continue;
    }
    out[i] = (after.s_grad[0][i] - before.s_grad[0][i]) / (2.0 * dt) + force[i];
  }
  return out;
}

RealField continuity_residual(const HydroFields& before, const HydroFields& now, const HydroFields& after,
                              const HamiltonianSpec& spec, double dt) {
  require_1d_triple(before, now, after, dt);
  const SpatialGrid& g = now.grid();
  const VelocityField v = bohmian_velocity(now, spec);
  RealField flux(g);
  for (std::size_t i = 0; i < g.size(); ++i) flux[i] = now.rho[i] * v[0][i];
  const RealField div = gradient(flux, now.boundary, 0);
  RealField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (near_mask(now.node_mask, i, 1)) continue;
    out[i] = (after.rho[i] - before.rho[i]) / (2.0 * dt) + div[i];
  }
  return out;
}

RealField log_derivative_identity_residual(const RealField& rho, Boundary boundary) {
  const SpatialGrid& g = rho.grid();
  if (g.dim() != 1) throw ConfigurationError("madelung", "identity check is one-dimensional");
  RealField r(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(rho[i] > 0.0)) throw DomainError("madelung", "identity check needs a strictly positive density");
    r[i] = std::sqrt(rho[i]);
  }
  const RealField ones(g, 1.0);
  const RealField d_rho = gradient(rho, boundary, 0);
  const RealField dd_rho = laplacian_weighted(rho, ones, boundary, 0);
  const RealField dd_r = laplacian_weighted(r, ones, boundary, 0);
  RealField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double l = d_rho[i] / rho[i];
    out[i] = 0.25 * l * l - (0.5 * dd_rho[i] / rho[i] - dd_r[i] / r[i]);
  }
  return out;
}

void write_hydro_csv(std::ostream& os, const HydroFields& h) {
  const SpatialGrid& g = h.grid();
  os << std::setprecision(17);
  os << (g.dim() == 2 ? "qx,qy,rho,s_grad_x,s_grad_y,mask\n" : "q,rho,s_grad,mask\n");
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point q = g.point(i);
    os << q[0] << ',';
    if (g.dim() == 2) os << q[1] << ',';
    os << h.rho[i];
    for (int a = 0; a < g.dim(); ++a) os << ',' << h.s_grad[a][i];
    os << ',' << static_cast<int>(h.node_mask[i]) << '\n';
  }
}

}  // namespace stochaction
