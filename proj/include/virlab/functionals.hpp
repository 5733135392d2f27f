#pragma once

// Energy and length of paths under the right-invariant L^2-metric,
//   E(phi)    = int int phi_t^2 phi_x dx dt,
//   L(phi)    = int_0^T (int phi_t^2 phi_x dx)^{1/2} dt,
// the central defect C(phi) = int int phi_tx phi_xx / phi_x^2 dx dt, and the
// Virasoro energy E(phi,alpha) = E(phi) + int (alpha_t - d(t))^2 dt where
// d(t) is the central defect integrand's spatial integral.

#include <vector>

#include "virlab/diffpath.hpp"

namespace virlab {

struct VirasoroPath {
    DiffPath path;
    std::vector<double> alpha;  // one value per time node

    VirasoroPath() = default;
    VirasoroPath(DiffPath p, std::vector<double> a) : path(std::move(p)), alpha(std::move(a)) {
        if (int(alpha.size()) != path.grid.n_t)
            throw InvariantError("VirasoroPath: alpha length != n_t");
        for (double v : alpha)
            if (!std::isfinite(v)) throw InvariantError("VirasoroPath: non-finite alpha");
    }
};

double energy_diff(const DiffPath& path);

/// speed^2 profile sigma(t) = int phi_t^2 phi_x dx.
std::vector<double> speed2_profile(const DiffPath& path);

/// d(t) = int phi_tx phi_xx / phi_x^2 dx per time node.
std::vector<double> defect_profile(const DiffPath& path);

double central_defect(const DiffPath& path);

double energy_virasoro(const VirasoroPath& vp);

double length_diff(const DiffPath& path);

/// 4th-order derivative of a 1-d time series (same stencils as the fields).
std::vector<double> derivative_series(const std::vector<double>& v, double h, int order);

} // namespace virlab
