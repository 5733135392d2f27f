#include "virlab/reparam.hpp"

#include <algorithm>
#include <cmath>

#include "virlab/functionals.hpp"
#include "virlab/rootfind.hpp"
#include "virlab/spline.hpp"

namespace virlab {

DiffPath compose_time(const DiffPath& path, const std::vector<double>& f) {
    const GridSpec& g = path.grid;
    if (int(f.size()) != g.n_t) throw InvariantError("compose_time: f length != n_t");
    if (f.front() != 0.0 || f.back() != g.T)
        throw InvariantError("compose_time: f must fix t = 0 and t = T");
    ColumnSplines cols(0.0, g.dt(), g.n_t, g.n_x);
    {
        std::vector<double> col(g.n_t);
        for (int ix = 0; ix < g.n_x; ++ix) {
            for (int it = 0; it < g.n_t; ++it) col[it] = path.u.at(it, ix);
            cols.set_column(ix, col);
        }
    }
    cols.finalize();
    DiffPath out(g);
#pragma omp parallel for schedule(static)
    for (int it = 0; it < g.n_t; ++it)
        for (int ix = 0; ix < g.n_x; ++ix) out.u.at(it, ix) = cols.eval(ix, f[it]);
    out.validate();
    return out;
}

namespace {

/// Monotone solve of w(s) = target for Hermite-interpolated samples w.
double invert_monotone_samples(const MonotoneHermite& w, double target, double lo, double hi) {
    return monotone_root(
        [&](double s) {
            return std::pair<double, double>(w(s) - target, w.derivative(s));
        },
        lo, hi, 0.5 * (lo + hi), 1e-13);
}

} // namespace

ConstantSpeedResult constant_speed(const DiffPath& path) {
    const GridSpec& g = path.grid;
    std::vector<double> s2 = speed2_profile(path);
    std::vector<double> v(g.n_t);
    for (int i = 0; i < g.n_t; ++i) v[i] = std::sqrt(std::max(s2[i], 0.0));
    // cumulative arclength (Simpson pairs, trapezoid on odd prefixes)
    std::vector<double> s(g.n_t, 0.0);
    const double dt = g.dt();
    for (int i = 1; i < g.n_t; ++i) {
        if (i % 2 == 0)
            s[i] = s[i - 2] + dt / 3.0 * (v[i - 2] + 4.0 * v[i - 1] + v[i]);
        else
            s[i] = s[i - 1] + dt / 2.0 * (v[i - 1] + v[i]);
    }
    const double L = s.back();
    if (!(L > 1e-12)) throw ZeroLength("constant_speed: path has zero length");

    MonotoneHermite s_itp(0.0, dt, s);
    std::vector<double> f(g.n_t);
    f[0] = 0.0;
    f[g.n_t - 1] = g.T;
    for (int i = 1; i < g.n_t - 1; ++i)
        f[i] = invert_monotone_samples(s_itp, L * g.t(i) / g.T, 0.0, g.T);

    ConstantSpeedResult out;
    out.path = compose_time(path, f);
    out.f = std::move(f);
    out.length = L;
    std::vector<double> s2r = speed2_profile(out.path);
    double mean = 0.0;
    for (double w : s2r) mean += std::sqrt(std::max(w, 0.0));
    mean /= double(g.n_t);
    double var = 0.0;
    for (double w : s2r) {
        const double d = std::sqrt(std::max(w, 0.0)) - mean;
        var += d * d;
    }
    out.speed_rel_std = std::sqrt(var / double(g.n_t)) / mean;
    return out;
}

LengthReport reduce_length(const DiffPath& path, const SeminormOrder& order, double eps) {
    if (order.n < 1) throw OrderConstraint("reduce_length: requires n >= 1");
    const GridSpec& g = path.grid;

    LengthReport rep;
    rep.length_before = length_diff(path);
    rep.l2_phi = rep.length_before * rep.length_before;

    ConstantSpeedResult cs = constant_speed(path);
    const DiffPath& phi_f = cs.path;
    {
        const double l = length_diff(phi_f);
        rep.l2_phi_f = l * l;
    }
    rep.e_phi_f_over_t = energy_diff(phi_f) / g.T;

    rep.inner = perturb(phi_f, order, eps, 1);
    const DiffPath& psi_t = rep.inner.psi;
    rep.e_psi_t_over_t = energy_diff(psi_t) / g.T;

    ConstantSpeedResult cs2 = constant_speed(psi_t);
    rep.e_psi_g_over_t = energy_diff(cs2.path) / g.T;

    // h = g o f^{-1}
    MonotoneHermite f_itp(0.0, g.dt(), cs.f);
    MonotoneHermite g_itp(0.0, g.dt(), cs2.f);
    std::vector<double> h(g.n_t);
    h[0] = 0.0;
    h[g.n_t - 1] = g.T;
    for (int i = 1; i < g.n_t - 1; ++i) {
        const double finv = monotone_root(
            [&](double s) {
                return std::pair<double, double>(f_itp(s) - g.t(i), f_itp.derivative(s));
            },
            0.0, g.T, g.t(i), 1e-13);
        h[i] = std::clamp(g_itp(finv), 0.0, g.T);
    }
    rep.psi = compose_time(psi_t, h);  // psi~ o (g o f^{-1})

    rep.length_after = length_diff(rep.psi);
    rep.l2_psi = rep.length_after * rep.length_after;

    ScalarField2D diff(g);
    for (std::size_t i = 0; i < diff.values.size(); ++i)
        diff.values[i] = rep.psi.u.values[i] - path.u.values[i];
    rep.closeness = seminorm_S(diff, order);
    return rep;
}

} // namespace virlab
