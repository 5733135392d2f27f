#include "virlab/diffpath.hpp"

#include <cmath>

#include "virlab/spline.hpp"

namespace virlab {

std::vector<double> Diffeo1D::phi_x() const {
    DerivPlan plan = DerivPlan::build(n, h(), 1);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < plan.width[i]; ++j) acc += plan.w[i][j] * u[plan.start[i] + j];
        out[i] = 1.0 + acc;
    }
    return out;
}

void Diffeo1D::validate(double tail_tol) const {
    std::vector<double> px = phi_x();
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(u[i])) throw InvariantError("Diffeo1D: non-finite displacement");
        if (!(px[i] > 0.0)) throw NotDiffeo("Diffeo1D: phi_x <= 0 at a node");
    }
    const double w = 1.0 + x_max * x_max;
    for (int i : {0, n - 1}) {
        if (w * std::abs(u[i]) > tail_tol || w * std::abs(px[i] - 1.0) > tail_tol)
            throw TailError("Diffeo1D: boundary decay proxy violated");
    }
}

void DiffPath::validate(double tail_tol) const {
    u.check_finite();
    ScalarField2D px = derivative_space(u, 1);
    const GridSpec& g = grid;
    for (int it = 0; it < g.n_t; ++it) {
        const double* row = px.row(it);
        for (int ix = 0; ix < g.n_x; ++ix)
            if (!(1.0 + row[ix] > 0.0)) throw NotDiffeo("DiffPath: phi_x <= 0 at a node");
    }
    const double w = 1.0 + g.x_max * g.x_max;
    for (int it = 0; it < g.n_t; ++it) {
        for (int ix : {0, g.n_x - 1}) {
            if (w * std::abs(u.at(it, ix)) > tail_tol || w * std::abs(px.at(it, ix)) > tail_tol)
                throw TailError("DiffPath: boundary decay proxy violated");
        }
    }
}

Diffeo1D DiffPath::time_slice(int it) const {
    Diffeo1D d(grid.n_x, grid.x_max);
    for (int ix = 0; ix < grid.n_x; ++ix) d.u[ix] = u.at(it, ix);
    return d;
}

double interpolate_time(const DiffPath& path, double t, int x_index) {
    const GridSpec& g = path.grid;
    if (!(t >= 0.0 && t <= g.T)) throw DomainError("interpolate_time: t outside [0,T]");
    std::vector<double> col(g.n_t);
    for (int it = 0; it < g.n_t; ++it) col[it] = path.u.at(it, x_index);
    CubicSpline s(0.0, g.dt(), col);
    return g.x(x_index) + s(t);
}

DiffPath gaussian_loop_path(const GridSpec& g, double amplitude) {
    DiffPath p(g, sample(g, [&](double t, double x) {
                   return amplitude * std::sin(M_PI * t / g.T) * std::exp(-x * x);
               }));
    p.validate();
    return p;
}

DiffPath gaussian_ramp_path(const GridSpec& g, double amplitude, double b) {
    DiffPath p(g, sample(g, [&](double t, double x) {
                   const double s = std::sin(M_PI * t / g.T);
                   return amplitude * (t / g.T + b * s * s) * std::exp(-x * x);
               }));
    p.validate();
    return p;
}

DiffPath random_path(const GridSpec& g, std::uint64_t seed) {
    SplitMix64 rng(seed);
    double c[3], a[3], q[3], ph[3];
    for (int i = 0; i < 3; ++i) {
        c[i] = rng.uniform(-0.04, 0.04);
        a[i] = rng.uniform(-3.0, 3.0);
        q[i] = rng.uniform(0.5, 2.0);
        ph[i] = rng.uniform(0.0, 1.0);
    }
    DiffPath p(g, sample(g, [&](double t, double x) {
                   double v = 0.0;
                   for (int i = 0; i < 3; ++i) {
                       const double d = x - a[i];
                       v += c[i] * std::sin(M_PI * (q[i] * t / g.T + ph[i])) * std::exp(-d * d);
                   }
                   return v;
               }));
    p.validate();
    return p;
}

Diffeo1D random_diffeo(int n, double x_max, std::uint64_t seed) {
    SplitMix64 rng(seed);
    double c[3], a[3];
    for (int i = 0; i < 3; ++i) {
        c[i] = rng.uniform(-0.05, 0.05);
        a[i] = rng.uniform(-3.0, 3.0);
    }
    Diffeo1D d(n, x_max);
    for (int i = 0; i < n; ++i) {
        const double x = d.x(i);
        double v = 0.0;
        for (int j = 0; j < 3; ++j) {
            const double s = x - a[j];
            v += c[j] * std::exp(-s * s);
        }
        d.u[i] = v;
    }
    d.validate();
    return d;
}

DiffPath compose_spatial(const DiffPath& path, const Diffeo1D& eta) {
    const GridSpec& g = path.grid;
    if (eta.n != g.n_x || eta.x_max != g.x_max)
        throw InvariantError("compose_spatial: eta sampled on a different space axis");
    std::vector<double> target(g.n_x);
    for (int ix = 0; ix < g.n_x; ++ix) target[ix] = eta.phi(ix);
    DiffPath out(g);
#pragma omp parallel for schedule(static)
    for (int it = 0; it < g.n_t; ++it) {
        std::vector<double> slice(g.n_x);
        for (int ix = 0; ix < g.n_x; ++ix) slice[ix] = path.u.at(it, ix);
        DiffeoInterp phi_row(-g.x_max, g.dx(), slice);
        for (int ix = 0; ix < g.n_x; ++ix) {
            // (phi o eta)(x) - x = u_eta(x) + u_phi(eta(x))
            out.u.at(it, ix) = eta.u[ix] + phi_row.displacement(target[ix]);
        }
    }
    out.validate();
    return out;
}

} // namespace virlab
