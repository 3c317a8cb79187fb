#pragma once

#include "stochaction/grid.hpp"

namespace stochaction {

// Central second-order difference along `axis`. Dirichlet-zero treats the
// values beyond the edges as zero; periodic wraps.
template <class T>
Field<T> gradient(const Field<T>& f, Boundary boundary, int axis = 0);

// Flux-form discrete d/dq (w d/dq f): edge weights are the mean of the two
// adjacent cell weights, so the operator is symmetric for any positive w.
// axis < 0 sums over all axes. Throws DomainError when w <= 0 anywhere.
template <class T>
Field<T> laplacian_weighted(const Field<T>& f, const RealField& w, Boundary boundary, int axis = -1);

// Midpoint quadrature of conj(phi) * psi.
Complex inner_product(const ComplexField& phi, const ComplexField& psi);
double norm(const ComplexField& psi);
double integrate(const RealField& f);

}  // namespace stochaction
