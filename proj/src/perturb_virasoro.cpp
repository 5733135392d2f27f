#include "virlab/perturb_virasoro.hpp"

#include <algorithm>
#include <cmath>

#include "virlab/grid_field.hpp"

namespace virlab {

double Stage2Params::amp() const { return std::pow(eps, 2.0 * m + 1.5); }

double Stage2Params::f_tilde(double t) const {
    if (t <= 0.0 || t >= T) return 0.0;  // exact at the pinned endpoints
    return std::sin(M_PI * t / T) * std::sin(2.0 * M_PI * t / T);
}

double Stage2Params::g_profile(double x) const {
    const double y = (x - x0) / sigma_w;
    const double e = std::exp(-y * y);
    const double g_even = e, g_odd = y * e;
    return primary_even ? g_even + nu * g_odd : g_odd + nu * g_even;
}

namespace {

ScalarField2D bump_field(const GridSpec& g, const Stage2Params& p) {
    ScalarField2D B(g);
#pragma omp parallel for schedule(static)
    for (int it = 0; it < g.n_t; ++it) {
        const double ft = p.f_tilde(g.t(it));
        double* row = B.row(it);
        for (int ix = 0; ix < g.n_x; ++ix) row[ix] = ft * p.g_profile(g.x(ix));
    }
    return B;
}

double quad_2d(const ScalarField2D& dens) {
    const GridSpec& g = dens.grid;
    std::vector<double> wt = simpson_weights(g.n_t, g.dt());
    std::vector<double> wx = simpson_weights(g.n_x, g.dx());
    double acc = 0.0;
    for (int it = 0; it < g.n_t; ++it) {
        const double* r = dens.row(it);
        double rowacc = 0.0;
        for (int ix = 0; ix < g.n_x; ++ix) rowacc += wx[ix] * r[ix];
        acc += wt[it] * rowacc;
    }
    return acc;
}

} // namespace

double energy_linear_response(const DiffPath& path, const ScalarField2D& B) {
    ScalarField2D pt = derivative_time(path.u, 1);
    ScalarField2D px = derivative_space(path.u, 1);
    ScalarField2D Bt = derivative_time(B, 1);
    ScalarField2D Bx = derivative_space(B, 1);
    ScalarField2D dens(path.grid);
    for (std::size_t i = 0; i < dens.values.size(); ++i) {
        const double fx = 1.0 + px.values[i];
        dens.values[i] =
            2.0 * pt.values[i] * Bt.values[i] * fx + pt.values[i] * pt.values[i] * Bx.values[i];
    }
    return quad_2d(dens);
}

double defect_linear_response(const DiffPath& path, const ScalarField2D& B) {
    ScalarField2D ptx = derivative_space(derivative_time(path.u, 1), 1);
    ScalarField2D pxx = derivative_space(path.u, 2);
    ScalarField2D px = derivative_space(path.u, 1);
    ScalarField2D Btx = derivative_space(derivative_time(B, 1), 1);
    ScalarField2D Bxx = derivative_space(B, 2);
    ScalarField2D Bx = derivative_space(B, 1);
    ScalarField2D dens(path.grid);
    for (std::size_t i = 0; i < dens.values.size(); ++i) {
        const double fx = 1.0 + px.values[i];
        dens.values[i] =
            (Btx.values[i] * pxx.values[i] + ptx.values[i] * Bxx.values[i]) / (fx * fx) -
            2.0 * ptx.values[i] * pxx.values[i] * Bx.values[i] / (fx * fx * fx);
    }
    return quad_2d(dens);
}

PerturbationReport stage1(const DiffPath& path, const SeminormOrder& order, double eps) {
    if (order.k < 1 || order.m < 2 || order.n < 1)
        throw OrderConstraint("stage1: requires k >= 1, m >= 2, n >= 1");
    return perturb(path, order, eps, order.m + 1);
}

DiffPath stage2_bump(const DiffPath& phi_tilde, const Stage2Params& p) {
    const GridSpec& g = phi_tilde.grid;
    ScalarField2D B = bump_field(g, p);
    DiffPath out(g);
    const double A = p.amp() * p.lambda;
    for (std::size_t i = 0; i < out.u.values.size(); ++i)
        out.u.values[i] = phi_tilde.u.values[i] + A * B.values[i];
    out.validate();
    return out;
}

namespace {

/// Orthogonalize the two-Gaussian basis against the discrete energy response.
bool setup_profile(const DiffPath& phi_tilde, Stage2Params& p) {
    const GridSpec& g = phi_tilde.grid;
    Stage2Params pe = p;
    pe.nu = 0.0;
    pe.primary_even = true;
    Stage2Params po = pe;
    po.primary_even = false;
    ScalarField2D Be = bump_field(g, pe);
    ScalarField2D Bo = bump_field(g, po);
    const double ee = energy_linear_response(phi_tilde, Be);
    const double eo = energy_linear_response(phi_tilde, Bo);
    if (ee == 0.0 && eo == 0.0) {
        p.primary_even = true;
        p.nu = 0.0;
        return true;
    }
    if (std::abs(eo) >= std::abs(ee)) {
        p.primary_even = true;
        p.nu = -ee / eo;
    } else {
        p.primary_even = false;
        p.nu = -eo / ee;
    }
    return std::isfinite(p.nu) && std::abs(p.nu) < 20.0;
}

std::vector<int> candidate_sites(const DiffPath& phi_tilde, const Stage2Params& p) {
    const GridSpec& g = phi_tilde.grid;
    ScalarField2D ptx = derivative_space(derivative_time(phi_tilde.u, 1), 1);
    std::vector<double> wt = simpson_weights(g.n_t, g.dt());
    std::vector<double> score(g.n_x, 0.0);
    const double x_lim = g.x_max - 5.0 * p.sigma_w;  // keep bump tails below tolerance
#pragma omp parallel for schedule(static)
    for (int ix = 0; ix < g.n_x; ++ix) {
        if (std::abs(g.x(ix)) > x_lim) continue;
        double acc = 0.0;
        for (int it = 0; it < g.n_t; ++it) acc += wt[it] * p.f_tilde(g.t(it)) * ptx.at(it, ix);
        score[ix] = std::abs(acc);
    }
    std::vector<int> idx;
    for (int ix = 0; ix < g.n_x; ++ix)
        if (score[ix] > 0.0) idx.push_back(ix);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return score[a] > score[b]; });
    if (idx.size() > 3) idx.resize(3);
    return idx;
}

} // namespace

double solve_lambda(const DiffPath& phi, const DiffPath& phi_tilde, Stage2Params& p) {
    const GridSpec& g = phi_tilde.grid;
    if (p.sigma_w < 8.0 * g.dx())
        throw BadBumpChoice("solve_lambda: profile width below grid resolution");
    const double c_target = central_defect(phi);

    std::vector<int> candidates = candidate_sites(phi_tilde, p);
    if (candidates.empty())
        throw BadBumpChoice("solve_lambda: no usable site for the stage-2 bump");

    for (int ix0 : candidates) {
        Stage2Params trial = p;
        trial.x0 = g.x(ix0);
        if (!setup_profile(phi_tilde, trial)) continue;
        ScalarField2D B = bump_field(g, trial);
        const double clin = defect_linear_response(phi_tilde, B);
        if (std::abs(clin) < 1e-6) continue;  // the |X(eps)| >= 1e-6 gate

        auto F = [&](double lam) {
            Stage2Params q = trial;
            q.lambda = lam;
            return central_defect(stage2_bump(phi_tilde, q)) - c_target;
        };
        const double f0 = central_defect(phi_tilde) - c_target;
        double lam_prev = 0.0, f_prev = f0;
        double lam = -f0 / (trial.amp() * clin);
        double fl = F(lam);
        int it = 0;
        bool ok = true;
        while (std::abs(fl) > 1e-11) {
            if (++it > 50 || fl == f_prev) {
                ok = false;
                break;
            }
            const double lam_next = lam - fl * (lam - lam_prev) / (fl - f_prev);
            lam_prev = lam;
            f_prev = fl;
            lam = lam_next;
            fl = F(lam);
        }
        if (!ok) throw NoRoot("solve_lambda: secant failed to converge");
        trial.lambda = lam;
        p = trial;
        return lam;
    }
    throw BadBumpChoice("solve_lambda: defect response too small at every candidate site");
}

std::vector<double> integrate_beta(const std::vector<double>& alpha, const DiffPath& psi,
                                   const DiffPath& phi) {
    if (!(psi.grid == phi.grid)) throw InvariantError("integrate_beta: grids differ");
    const GridSpec& g = psi.grid;
    if (int(alpha.size()) != g.n_t) throw InvariantError("integrate_beta: alpha length != n_t");
    std::vector<double> dpsi = defect_profile(psi);
    std::vector<double> dphi = defect_profile(phi);
    const double dt = g.dt();
    const auto v = [&](int k) { return dpsi[k] - dphi[k]; };
    std::vector<double> cum(g.n_t, 0.0);
    for (int i = 1; i < g.n_t; ++i) {
        if (i % 2 == 0)
            cum[i] = cum[i - 2] + dt / 3.0 * (v(i - 2) + 4.0 * v(i - 1) + v(i));
        else
            cum[i] = cum[i - 1] + dt / 2.0 * (v(i - 1) + v(i));
    }
    std::vector<double> beta(g.n_t);
    for (int i = 0; i < g.n_t; ++i) beta[i] = alpha[i] + cum[i];
    return beta;
}

VirasoroPerturbationReport perturb_virasoro(const VirasoroPath& vp, const SeminormOrder& order,
                                            double eps) {
    if (order.k < 1 || order.m < 2 || order.n < 1)
        throw OrderConstraint("perturb_virasoro: requires k >= 1, m >= 2, n >= 1");
    const DiffPath& phi = vp.path;
    const GridSpec& g = phi.grid;

    VirasoroPerturbationReport rep;
    rep.evir_before = energy_virasoro(vp);

    rep.stage1 = stage1(phi, order, eps);
    const DiffPath& phi_tilde = rep.stage1.psi;
    rep.stage1_saving = rep.stage1.delta_e;

    rep.stage2.eps = eps;
    rep.stage2.m = order.m;
    rep.stage2.T = g.T;
    rep.lambda = solve_lambda(phi, phi_tilde, rep.stage2);
    DiffPath psi = stage2_bump(phi_tilde, rep.stage2);
    rep.lambda_residual = std::abs(central_defect(psi) - central_defect(phi));
    rep.stage2_disturbance = std::abs(energy_diff(psi) - energy_diff(phi_tilde));

    std::vector<double> beta = integrate_beta(vp.alpha, psi, phi);
    rep.beta_endpoint_residual = std::abs(beta.back() - vp.alpha.back());

    // closeness: stage-1 refined seminorm plus the (resolved) stage-2 bump
    {
        const double A = rep.stage2.amp() * rep.stage2.lambda;
        ScalarField2D bump = bump_field(g, rep.stage2);
        for (double& v2 : bump.values) v2 *= A;
        rep.closeness_path = rep.stage1.closeness + seminorm_S(bump, order);
    }
    {
        std::vector<double> diff(g.n_t);
        for (int i = 0; i < g.n_t; ++i) diff[i] = beta[i] - vp.alpha[i];
        double acc = 0.0;
        const double dt = g.dt();
        for (int j = 0; j <= order.n; ++j) {
            std::vector<double> d = j == 0 ? diff : derivative_series(diff, dt, j);
            double mx = 0.0;
            for (double w : d) mx = std::max(mx, std::abs(w));
            acc += mx;
        }
        rep.closeness_alpha = acc;
    }

    VirasoroPath out(std::move(psi), std::move(beta));
    rep.evir_after = energy_virasoro(out);
    rep.defect_term_residual = std::abs((rep.evir_after - energy_diff(out.path)) -
                                        (rep.evir_before - energy_diff(phi)));
    rep.perturbed = std::move(out);
    return rep;
}

double virasoro_decrease_threshold(const VirasoroPath& vp, const SeminormOrder& order,
                                   double eps0) {
    double eps = eps0;
    for (int k = 0; k < 8; ++k) {
        try {
            VirasoroPerturbationReport r = perturb_virasoro(vp, order, eps);
            if (r.evir_after < r.evir_before) return eps;
        } catch (const InvariantError&) {
            // warp too large at this eps; shrink
        }
        eps *= 0.5;
    }
    throw NoRoot("virasoro_decrease_threshold: no eps with a strict decrease found");
}

} // namespace virlab
