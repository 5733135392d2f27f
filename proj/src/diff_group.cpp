#include "virlab/diff_group.hpp"

#include <algorithm>
#include <cmath>

#include "virlab/omp_util.hpp"
#include "virlab/rootfind.hpp"
#include "virlab/spline.hpp"

namespace virlab {

namespace {

void check_same_axis(const Diffeo1D& a, const Diffeo1D& b, const char* who) {
    if (a.n != b.n || a.x_max != b.x_max) throw InvariantError(std::string(who) + ": mismatched axes");
}

} // namespace

Diffeo1D compose(const Diffeo1D& phi, const Diffeo1D& psi) {
    check_same_axis(phi, psi, "compose");
    DiffeoInterp itp(-phi.x_max, phi.h(), phi.u);
    Diffeo1D out(phi.n, phi.x_max);
    for (int i = 0; i < out.n; ++i) {
        const double y = psi.phi(i);
        // (phi o psi)(x) - x = u_psi(x) + u_phi(psi(x))
        out.u[i] = psi.u[i] + itp.displacement(y);
    }
    out.validate();
    return out;
}

Diffeo1D invert(const Diffeo1D& phi) {
    std::vector<double> px = phi.phi_x();
    for (double v : px)
        if (!(v > 0.0)) throw NotDiffeo("invert: non-monotone data");
    DiffeoInterp itp(-phi.x_max, phi.h(), phi.u);
    double umax = 0.0;
    for (double v : phi.u) umax = std::max(umax, std::abs(v));
    Diffeo1D out(phi.n, phi.x_max);
    OmpErrorCollector errs;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < out.n; ++i) {
        errs.run([&] {
            const double x = out.x(i);
            const double lo = x - umax - 1e-6, hi = x + umax + 1e-6;
            const double y = monotone_root(
                [&](double s) {
                    // phi(s) - x = (s - x) + u(s): exact subtraction of
                    // nearby arguments keeps the residual at the u-scale
                    return std::pair<double, double>((s - x) + itp.displacement(s),
                                                     itp.phi_prime(s));
                },
                lo, hi, x, 1e-13);
            out.u[i] = y - x;
        });
    }
    errs.rethrow_if_any();
    out.validate();
    return out;
}

double bott_cocycle(const Diffeo1D& phi, const Diffeo1D& psi) {
    check_same_axis(phi, psi, "bott_cocycle");
    const int n = phi.n;
    const double h = phi.h();
    // phi' - 1 sampled on the grid, interpolated at psi(x); identically zero
    // data stays exactly zero
    std::vector<double> dphi_m1(n);
    {
        std::vector<double> px = phi.phi_x();
        for (int i = 0; i < n; ++i) dphi_m1[i] = px[i] - 1.0;
    }
    MonotoneHermite itp(-phi.x_max, h, dphi_m1, /*enforce_monotone=*/false);
    std::vector<double> psix = psi.phi_x();
    DerivPlan plan2 = DerivPlan::build(n, h, 2);
    std::vector<double> integrand(n);
    for (int i = 0; i < n; ++i) {
        double psixx = 0.0;
        for (int j = 0; j < plan2.width[i]; ++j) psixx += plan2.w[i][j] * psi.u[plan2.start[i] + j];
        const double y = psi.phi(i);
        const double fp1 = (y <= itp.x_min() || y >= itp.x_max()) ? 0.0 : itp(y);
        integrand[i] = std::log1p(fp1) * psixx / psix[i];
    }
    return 0.5 * integrate_1d(integrand, h);
}

VirasoroElement virasoro_mul(const VirasoroElement& a, const VirasoroElement& b) {
    return {compose(a.phi, b.phi), a.alpha + b.alpha + bott_cocycle(a.phi, b.phi)};
}

VirasoroElement virasoro_inv(const VirasoroElement& a) {
    return {invert(a.phi), -a.alpha};
}

} // namespace virlab
