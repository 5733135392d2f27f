#pragma once

// The energy-reducing time-warp construction: pick a site where phi_t is
// sign-definite, warp time per space fiber by
//     r^{-1}(t,x) = t + eps^{m+a} f(t) (g((x-x0)/eps) - mu),
// and resample psi(t,x) = phi(r(t,x), x). Endpoints are preserved exactly
// (f vanishes near t = 0, T); the energy drops by ~ eps^{m+a} X while
// ||psi - phi||_{S^{k,m,n}} ~ eps^a.
//
// The offset mu is a gauge choice allowed by the profile constraints
// (g constant outside [0,1], g' >= 0): it cancels the first-order response
// of E to the x-uniform part of the warp, which otherwise swamps the layer
// saving. Both Delta E and the closeness seminorm are evaluated on an
// x-refined sampling when the transition layer (width eps) is near or below
// the path grid's dx.

#include <vector>

#include "virlab/diffpath.hpp"
#include "virlab/grid_field.hpp"

namespace virlab {

struct Site {
    int it0 = 0;
    int ix0 = 0;
    int sign = 0;      // sign of phi_t on the box
    double delta = 0;  // box half-width (time units)
};

/// Time bump f (scaled classical mollifier around t0) and spatial transition
/// profile g (normalized mollifier integral mapped to [0,1], flipped when
/// sign < 0, shifted by the gauge offset mu).
struct BumpPair {
    double t0 = 0.0;
    double delta = 0.0;
    double x0 = 0.0;
    int sign = 1;
    double amplitude = 0.3;
    double mu = 0.0;

    double f(double t) const;
    double f_prime(double t) const;
    /// profile before the mu offset: 0 -> 1 for sign > 0, 1 -> 0 for sign < 0
    double profile(double y) const;
    /// the warp profile actually used
    double g(double y) const { return profile(y) - mu; }

    double sup_f() const;
    double sup_f_prime() const;
    double sup_g() const;
    /// g(1) - g(0): +1 or -1, independent of mu
    double g_jump() const { return sign > 0 ? 1.0 : -1.0; }
};

struct WarpParams {
    double eps = 0.0;
    int a = 1;
    SeminormOrder order;
    Site site;

    int exponent() const { return order.m + a; }
};

struct TimeWarp {
    GridSpec grid;
    ScalarField2D r_inv;  // sampled r^{-1}(t,x)
    ScalarField2D r;      // sampled r(t,x)
    BumpPair bumps;
    double eps = 0.0;
    int m_plus_a = 0;

    double amp() const;
    /// analytic r^{-1} at arbitrary (t,x)
    double r_inverse_at(double t, double x) const;
    /// r at arbitrary (t,x), by monotone solve on the analytic r^{-1}
    double r_at(double t, double x) const;
};

struct PerturbationReport {
    DiffPath psi;
    double energy_before = 0.0;    // refined evaluation
    double energy_after = 0.0;     // refined evaluation
    double delta_e = 0.0;          // energy_before - energy_after
    double delta_e_native = 0.0;   // same difference on the path grid
    double closeness = 0.0;        // ||psi-phi||_{S^{k,m,n}} (refined)
    double endpoint_residual_0 = 0.0;
    double endpoint_residual_T = 0.0;
    double predicted = 0.0;        // leading-order saving
    double ratio = 0.0;            // delta_e / predicted
    double mu = 0.0;
    Site site;
    int refine_factor = 1;
};

/// Largest-|phi_t| grid point whose surrounding box (half-width delta,
/// auto-shrunk from 0.2 T) has |phi_t| >= max/2 with constant sign.
Site select_site(const DiffPath& path, double delta0 = -1.0);

/// Default bumps at a site, including the gauge offset mu for this path/eps.
BumpPair default_bumps(const DiffPath& path, const Site& site, double eps,
                       double amplitude = 0.3);

TimeWarp build_warp(const GridSpec& grid, const WarpParams& params, const BumpPair& bumps);

DiffPath apply_warp(const DiffPath& path, const TimeWarp& warp);

double predicted_leading_saving(const DiffPath& path, const BumpPair& bumps,
                                const WarpParams& params);

PerturbationReport perturb(const DiffPath& path, const SeminormOrder& order, double eps, int a);

/// Least-squares slope of log(val) against log(eps).
double fit_loglog_slope(const std::vector<std::pair<double, double>>& pts);

/// Monotonicity bound, then halve eps until Delta E > 0; returns that eps.
double energy_decrease_threshold(const DiffPath& path, const SeminormOrder& order, int a);

} // namespace virlab
