#pragma once

// Two-stage energy reduction on the Virasoro-Bott group.
// Stage 1: the time warp with a = m+1 (saving ~ eps^{2m+1}).
// Stage 2: an additive bump psi = phi~ + eps^{2m+3/2} lambda f~(t) G(x) whose
// lambda is tuned so C(psi) = C(phi), making the corrected central component
// beta hit alpha(T) exactly. G is a fixed-scale two-Gaussian combination
// projected to annihilate the discrete linearized E response, so the tuning
// moves the defect without spending first-order energy.
// Finally beta solves  beta_t = alpha_t + d_psi(t) - d_phi(t), beta(0)=alpha(0).

#include "virlab/functionals.hpp"
#include "virlab/perturb_diff.hpp"

namespace virlab {

struct Stage2Params {
    double eps = 0.0;
    int m = 2;
    double lambda = 0.0;
    double x0 = 0.0;
    double sigma_w = 2.0;  // spatial width of the profile
    double nu = 0.0;       // mixing weight of the orthogonalized basis
    bool primary_even = true;  // which basis member carries the unit weight
    double T = 1.0;

    double amp() const;                 // eps^{2m+3/2}
    double f_tilde(double t) const;     // sin(pi t/T) sin(2 pi t/T)
    double g_profile(double x) const;   // orthogonalized spatial profile
};

struct VirasoroPerturbationReport {
    VirasoroPath perturbed;
    PerturbationReport stage1;
    Stage2Params stage2;
    double evir_before = 0.0;
    double evir_after = 0.0;
    double stage1_saving = 0.0;        // refined E(phi) - E(phi~)
    double stage2_disturbance = 0.0;   // |E(psi) - E(phi~)|
    double lambda = 0.0;
    double lambda_residual = 0.0;      // |C(psi) - C(phi)| after the solve
    double beta_endpoint_residual = 0.0;
    double closeness_path = 0.0;       // triangle bound ||psi-phi~|| + ||phi~-phi||
    double closeness_alpha = 0.0;      // ||beta - alpha||_{C^n}
    double defect_term_residual = 0.0; // change of the second Virasoro term
};

/// Stage 1: the time warp run with a = m + 1. Requires k>=1, m>=2, n>=1.
PerturbationReport stage1(const DiffPath& path, const SeminormOrder& order, double eps);

/// Additive stage-2 bump (lambda from params).
DiffPath stage2_bump(const DiffPath& phi_tilde, const Stage2Params& p);

/// Tunes lambda so that C(stage2_bump(phi~, lambda)) = C(phi); fills p.lambda.
/// Throws BadBumpChoice when no admissible site has usable defect response,
/// NoRoot when the secant fails.
double solve_lambda(const DiffPath& phi, const DiffPath& phi_tilde, Stage2Params& p);

/// beta with beta(0) = alpha(0) and beta_t = alpha_t + d_psi - d_phi
/// (cumulative Simpson with trapezoid on odd prefixes).
std::vector<double> integrate_beta(const std::vector<double>& alpha, const DiffPath& psi,
                                   const DiffPath& phi);

VirasoroPerturbationReport perturb_virasoro(const VirasoroPath& vp, const SeminormOrder& order,
                                            double eps);

/// Largest dyadic eps <= eps0 at which the full pipeline strictly decreases
/// the Virasoro energy (the savings scale like eps^{2m+1}, so weak paths need
/// small eps before the tuning cost is dominated).
double virasoro_decrease_threshold(const VirasoroPath& vp, const SeminormOrder& order,
                                   double eps0 = 0.2);

/// Exact derivative of the discrete energy along a displacement direction.
double energy_linear_response(const DiffPath& path, const ScalarField2D& direction);

/// Exact derivative of the discrete central defect along a direction.
double defect_linear_response(const DiffPath& path, const ScalarField2D& direction);

} // namespace virlab
