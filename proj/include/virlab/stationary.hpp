#pragma once

// Discrete critical paths of the energy with pinned endpoint slices, found by
// preconditioned nonlinear conjugate gradients (the preconditioner is the
// flat-metric Hessian, one dense Cholesky shared by all space columns), plus
// the saddle probe that applies the time-warp perturbation to them.

#include "virlab/diff_group.hpp"
#include "virlab/perturb_diff.hpp"

namespace virlab {

struct GradientResult {
    double energy = 0.0;
    ScalarField2D grad;  // zero on the endpoint rows (they are not variables)
};

/// Exact gradient of the discretized energy with respect to interior nodal
/// displacements.
GradientResult energy_gradient(const DiffPath& path);

/// Straight-line path between two diffeomorphisms on a grid.
DiffPath linear_path(const Diffeo1D& phi0, const Diffeo1D& phi1, const GridSpec& grid);

struct CriticalPathResult {
    DiffPath path;
    int iterations = 0;
    double grad_max = 0.0;
    double energy = 0.0;
};

CriticalPathResult find_critical_path(const Diffeo1D& phi0, const Diffeo1D& phi1,
                                      const DiffPath& init, int max_iter = 500,
                                      double tol = 1e-8);

struct SaddleReport {
    PerturbationReport rep;
    double grad_max = 0.0;  // stationarity of the input path
};

/// Applies perturb to a stationary path and reports the measured energy
/// change. (At a true stationary point every endpoint-preserving variation
/// has zero first-order response, so delta_e here is a second-order quantity;
/// see the README notes.)
SaddleReport verify_saddle(const DiffPath& path, const SeminormOrder& order, double eps);

} // namespace virlab
