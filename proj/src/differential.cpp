#include "stochaction/differential.hpp"

#include <cmath>

namespace stochaction {

namespace {

// Neighbour values along one axis, honouring the boundary rule.
template <class T>
struct Neighbours {
  T minus;
  T plus;
};

template <class T>
Neighbours<T> neighbours(const Field<T>& f, std::size_t idx, int axis, Boundary boundary) {
  const SpatialGrid& g = f.grid();
  const std::size_t n = g.points(axis);
  const std::size_t s = g.stride(axis);
  const std::size_t i = g.coordinate_index(idx, axis);
  Neighbours<T> out{T{}, T{}};
  if (i > 0) {
    out.minus = f[idx - s];
  } else if (boundary == Boundary::periodic) {
    out.minus = f[idx + (n - 1) * s];
  }
  if (i + 1 < n) {
    out.plus = f[idx + s];
  } else if (boundary == Boundary::periodic) {
    out.plus = f[idx - (n - 1) * s];
  }
  return out;
}

void check_axis_arg(const SpatialGrid& g, int axis) {
  if (axis < 0 || axis >= g.dim()) throw ConfigurationError("core_numerics", "axis out of range");
}

}  // namespace

template <class T>
Field<T> gradient(const Field<T>& f, Boundary boundary, int axis) {
  const SpatialGrid& g = f.grid();
  check_axis_arg(g, axis);
  Field<T> out(g);
  const double inv2h = 0.5 / g.spacing(axis);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const auto nb = neighbours(f, idx, axis, boundary);
    out[idx] = (nb.plus - nb.minus) * inv2h;
  }
  return out;
}

template <class T>
Field<T> laplacian_weighted(const Field<T>& f, const RealField& w, Boundary boundary, int axis) {
  const SpatialGrid& g = f.grid();
  require_same_grid(g, w.grid(), "core_numerics");
  for (double v : w.values()) {
    if (!(v > 0.0)) throw DomainError("core_numerics", "laplacian weight must be strictly positive");
  }
  Field<T> out(g);
  const int first = axis < 0 ? 0 : axis;
  const int last = axis < 0 ? g.dim() - 1 : axis;
  if (axis >= g.dim()) throw ConfigurationError("core_numerics", "axis out of range");
  for (int a = first; a <= last; ++a) {
    const double inv_h2 = 1.0 / (g.spacing(a) * g.spacing(a));
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
      const auto fv = neighbours(f, idx, a, boundary);
      auto wv = neighbours(w, idx, a, boundary);
      // Dirichlet edges reuse the boundary cell weight for the outer half-edge.
      const std::size_t i = g.coordinate_index(idx, a);
      if (boundary == Boundary::dirichlet_zero) {
        if (i == 0) wv.minus = w[idx];
        if (i + 1 == g.points(a)) wv.plus = w[idx];
      }
      const double w_plus = 0.5 * (w[idx] + wv.plus);
      const double w_minus = 0.5 * (w[idx] + wv.minus);
      out[idx] += (w_plus * (fv.plus - f[idx]) - w_minus * (f[idx] - fv.minus)) * inv_h2;
    }
  }
  return out;
}

template RealField gradient(const RealField&, Boundary, int);
template ComplexField gradient(const ComplexField&, Boundary, int);
template RealField laplacian_weighted(const RealField&, const RealField&, Boundary, int);
template ComplexField laplacian_weighted(const ComplexField&, const RealField&, Boundary, int);

Complex inner_product(const ComplexField& phi, const ComplexField& psi) {
  require_same_grid(phi.grid(), psi.grid(), "core_numerics");
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < phi.size(); ++i) acc += std::conj(phi[i]) * psi[i];
  return acc * phi.grid().cell_volume();
}

double norm(const ComplexField& psi) {
  double acc = 0.0;
  for (const Complex& v : psi.values()) acc += std::norm(v);
  return std::sqrt(acc * psi.grid().cell_volume());
}

double integrate(const RealField& f) {
  double acc = 0.0;
  for (double v : f.values()) acc += v;
  return acc * f.grid().cell_volume();
}

}  // namespace stochaction
