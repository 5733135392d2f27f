#pragma once

// Group operations on Diff_S(R) and its Virasoro-Bott central extension:
// composition, inversion, the Bott cocycle
//   c(phi, psi) = 1/2 int log(phi'(psi(x))) psi''/psi' dx,
// and (phi,a)(psi,b) = (phi o psi, a + b + c(phi,psi)).

#include "virlab/diffpath.hpp"

namespace virlab {

struct VirasoroElement {
    Diffeo1D phi;
    double alpha = 0.0;
};

/// (phi o psi)(x) = phi(psi(x)) via monotone interpolation of phi off-grid.
Diffeo1D compose(const Diffeo1D& phi, const Diffeo1D& psi);

/// Per-node monotone solve of phi(y) = x; compose(phi, invert(phi)) = Id
/// to ~1e-12 residual.
Diffeo1D invert(const Diffeo1D& phi);

double bott_cocycle(const Diffeo1D& phi, const Diffeo1D& psi);

VirasoroElement virasoro_mul(const VirasoroElement& a, const VirasoroElement& b);
VirasoroElement virasoro_inv(const VirasoroElement& a);

} // namespace virlab
