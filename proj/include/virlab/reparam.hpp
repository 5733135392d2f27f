#pragma once

// Constant-speed reparametrization and the length-reduction pipeline
//   phi~ = phi o f  (constant speed)
//   psi~ = perturb(phi~)
//   g    = constant-speed reparametrization of psi~
//   psi  = psi~ o g o f^{-1},
// which realizes L(psi) < L(phi) through the chain
//   L(psi)^2 = (1/T) E(psi~ o g) <= (1/T) E(psi~) < (1/T) E(phi o f) = L(phi)^2.

#include <vector>

#include "virlab/perturb_diff.hpp"

namespace virlab {

/// Resample u(f(t_i), x) column-wise (not-a-knot splines); f must be a
/// monotone time map with f[0] = 0, f[n_t-1] = T.
DiffPath compose_time(const DiffPath& path, const std::vector<double>& f);

struct ConstantSpeedResult {
    DiffPath path;             // phi o f
    std::vector<double> f;     // reparametrization samples
    double length = 0.0;       // L(phi) measured along the way
    double speed_rel_std = 0.0;  // flatness of the resampled speed profile
};

/// f = inverse of the normalized arclength; throws ZeroLength on constant
/// paths.
ConstantSpeedResult constant_speed(const DiffPath& path);

struct LengthReport {
    DiffPath psi;
    double length_before = 0.0;
    double length_after = 0.0;
    // chain terms, labeled top (smallest) to bottom
    double l2_psi = 0.0;          // L(psi)^2
    double e_psi_g_over_t = 0.0;  // (1/T) E(psi~ o g)
    double e_psi_t_over_t = 0.0;  // (1/T) E(psi~)
    double e_phi_f_over_t = 0.0;  // (1/T) E(phi o f)
    double l2_phi_f = 0.0;        // L(phi o f)^2
    double l2_phi = 0.0;          // L(phi)^2
    double closeness = 0.0;       // ||psi - phi||_{S^{k,m,n}} on the path grid
    PerturbationReport inner;     // the energy perturbation on phi~
};

/// Requires order.n >= 1.
LengthReport reduce_length(const DiffPath& path, const SeminormOrder& order, double eps);

} // namespace virlab
