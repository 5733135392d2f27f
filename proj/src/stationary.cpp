#include "virlab/stationary.hpp"

#include <algorithm>
#include <cmath>

#include "virlab/functionals.hpp"
#include "virlab/grid_field.hpp"

namespace virlab {

namespace {

/// scatter-transpose of a DerivPlan application along the time axis
void add_time_transpose(const DerivPlan& plan, const ScalarField2D& in, ScalarField2D& out) {
    const GridSpec& g = in.grid;
    for (int i = 0; i < g.n_t; ++i) {
        const double* src = in.row(i);
        for (int j = 0; j < plan.width[i]; ++j) {
            double* dst = out.row(plan.start[i] + j);
            const double c = plan.w[i][j];
            for (int ix = 0; ix < g.n_x; ++ix) dst[ix] += c * src[ix];
        }
    }
}

/// scatter-transpose along the space axis (row-parallel)
void add_space_transpose(const DerivPlan& plan, const ScalarField2D& in, ScalarField2D& out) {
    const GridSpec& g = in.grid;
#pragma omp parallel for schedule(static)
    for (int it = 0; it < g.n_t; ++it) {
        const double* src = in.row(it);
        double* dst = out.row(it);
        for (int ix = 0; ix < g.n_x; ++ix) {
            const double v = src[ix];
            for (int j = 0; j < plan.width[ix]; ++j) dst[plan.start[ix] + j] += plan.w[ix][j] * v;
        }
    }
}

} // namespace

GradientResult energy_gradient(const DiffPath& path) {
    const GridSpec& g = path.grid;
    ScalarField2D pt = derivative_time(path.u, 1);
    ScalarField2D px = derivative_space(path.u, 1);
    std::vector<double> wt = simpson_weights(g.n_t, g.dt());
    std::vector<double> wx = simpson_weights(g.n_x, g.dx());

    GradientResult out;
    ScalarField2D a(g), b(g);  // a = W 2 pt (1+px), b = W pt^2
    double energy = 0.0;
    for (int it = 0; it < g.n_t; ++it) {
        double rowacc = 0.0;
        for (int ix = 0; ix < g.n_x; ++ix) {
            const double W = wt[it] * wx[ix];
            const double fx = 1.0 + px.at(it, ix);
            const double v = pt.at(it, ix);
            rowacc += wx[ix] * v * v * fx;
            a.at(it, ix) = W * 2.0 * v * fx;
            b.at(it, ix) = W * v * v;
        }
        energy += wt[it] * rowacc;
    }
    out.energy = energy;
    out.grad = ScalarField2D(g);
    DerivPlan plan_t = DerivPlan::build(g.n_t, g.dt(), 1);
    DerivPlan plan_x = DerivPlan::build(g.n_x, g.dx(), 1);
    add_time_transpose(plan_t, a, out.grad);
    add_space_transpose(plan_x, b, out.grad);
    // endpoint slices are pinned
    for (int ix = 0; ix < g.n_x; ++ix) {
        out.grad.at(0, ix) = 0.0;
        out.grad.at(g.n_t - 1, ix) = 0.0;
    }
    return out;
}

DiffPath linear_path(const Diffeo1D& phi0, const Diffeo1D& phi1, const GridSpec& grid) {
    if (phi0.n != grid.n_x || phi1.n != grid.n_x || phi0.x_max != grid.x_max ||
        phi1.x_max != grid.x_max)
        throw InvariantError("linear_path: endpoint axes do not match the grid");
    DiffPath p(grid);
    for (int it = 0; it < grid.n_t; ++it) {
        const double s = grid.t(it) / grid.T;
        for (int ix = 0; ix < grid.n_x; ++ix)
            p.u.at(it, ix) = (1.0 - s) * phi0.u[ix] + s * phi1.u[ix];
    }
    p.validate();
    return p;
}

namespace {

/// Dense SPD Cholesky (small systems: the interior time operator).
struct Cholesky {
    int n = 0;
    std::vector<double> L;  // lower triangle, row-major

    explicit Cholesky(const std::vector<double>& A, int n_) : n(n_), L(A) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) {
                double s = L[std::size_t(i) * n + j];
                for (int k = 0; k < j; ++k) s -= L[std::size_t(i) * n + k] * L[std::size_t(j) * n + k];
                if (i == j) {
                    if (!(s > 0.0)) throw NumericalError("Cholesky: matrix not SPD");
                    L[std::size_t(i) * n + i] = std::sqrt(s);
                } else {
                    L[std::size_t(i) * n + j] = s / L[std::size_t(j) * n + j];
                }
            }
            for (int j = i + 1; j < n; ++j) L[std::size_t(i) * n + j] = 0.0;
        }
    }

    void solve(double* x) const {
        for (int i = 0; i < n; ++i) {
            double s = x[i];
            for (int k = 0; k < i; ++k) s -= L[std::size_t(i) * n + k] * x[k];
            x[i] = s / L[std::size_t(i) * n + i];
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = x[i];
            for (int k = i + 1; k < n; ++k) s -= L[std::size_t(k) * n + i] * x[k];
            x[i] = s / L[std::size_t(i) * n + i];
        }
    }
};

double dot_interior(const ScalarField2D& A, const ScalarField2D& B) {
    const GridSpec& g = A.grid;
    double acc = 0.0;
    for (int it = 1; it < g.n_t - 1; ++it) {
        const double* ra = A.row(it);
        const double* rb = B.row(it);
        double rowacc = 0.0;
        for (int ix = 0; ix < g.n_x; ++ix) rowacc += ra[ix] * rb[ix];
        acc += rowacc;
    }
    return acc;
}

double grad_max_interior(const ScalarField2D& G) {
    const GridSpec& g = G.grid;
    double mx = 0.0;
    for (int it = 1; it < g.n_t - 1; ++it) {
        const double* r = G.row(it);
        for (int ix = 0; ix < g.n_x; ++ix) mx = std::max(mx, std::abs(r[ix]));
    }
    return mx;
}

bool diffeo_ok(const ScalarField2D& u) {
    ScalarField2D px = derivative_space(u, 1);
    for (double v : px.values)
        if (!(1.0 + v > 0.0)) return false;
    return true;
}

} // namespace

CriticalPathResult find_critical_path(const Diffeo1D& phi0, const Diffeo1D& phi1,
                                      const DiffPath& init, int max_iter, double tol) {
    const GridSpec& g = init.grid;
    for (int ix = 0; ix < g.n_x; ++ix) {
        if (init.u.at(0, ix) != phi0.u[ix] || init.u.at(g.n_t - 1, ix) != phi1.u[ix])
            throw InvariantError("find_critical_path: init does not match the endpoints");
    }

    // flat-metric preconditioner: 2 (D_t^T diag(wt) D_t) restricted to the
    // interior rows, identical for every column up to the wx factor
    DerivPlan plan_t = DerivPlan::build(g.n_t, g.dt(), 1);
    std::vector<double> wt = simpson_weights(g.n_t, g.dt());
    std::vector<double> wx = simpson_weights(g.n_x, g.dx());
    const int ni = g.n_t - 2;
    std::vector<double> Dt(std::size_t(g.n_t) * g.n_t, 0.0);
    for (int i = 0; i < g.n_t; ++i)
        for (int j = 0; j < plan_t.width[i]; ++j)
            Dt[std::size_t(i) * g.n_t + plan_t.start[i] + j] = plan_t.w[i][j];
    std::vector<double> A(std::size_t(ni) * ni, 0.0);
    for (int r = 0; r < ni; ++r)
        for (int c = 0; c < ni; ++c) {
            double s = 0.0;
            for (int i = 0; i < g.n_t; ++i)
                s += Dt[std::size_t(i) * g.n_t + (r + 1)] * wt[i] * Dt[std::size_t(i) * g.n_t + (c + 1)];
            A[std::size_t(r) * ni + c] = 2.0 * s;
        }
    Cholesky chol(A, ni);

    auto precondition = [&](const ScalarField2D& R) {
        ScalarField2D Z(g);
        std::vector<double> col(ni);
#pragma omp parallel for schedule(static) firstprivate(col)
        for (int ix = 0; ix < g.n_x; ++ix) {
            for (int it = 1; it < g.n_t - 1; ++it) col[it - 1] = R.at(it, ix);
            chol.solve(col.data());
            const double inv_wx = 1.0 / wx[ix];
            for (int it = 1; it < g.n_t - 1; ++it) Z.at(it, ix) = col[it - 1] * inv_wx;
        }
        return Z;
    };

    DiffPath cur = init;
    GradientResult gr = energy_gradient(cur);
    ScalarField2D R = gr.grad;
    for (double& v : R.values) v = -v;
    ScalarField2D Z = precondition(R);
    ScalarField2D P = Z;
    double rz = dot_interior(R, Z);

    CriticalPathResult out;
    int it_count = 0;
    double gmax = grad_max_interior(gr.grad);
    while (gmax > tol && it_count < max_iter) {
        // Armijo on direction P with the diffeomorphism check folded in
        const double gTp = -dot_interior(R, P);
        double alpha = 1.0;
        DiffPath trial = cur;
        GradientResult gr2;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (int iti = 1; iti < g.n_t - 1; ++iti)
                for (int ix = 0; ix < g.n_x; ++ix)
                    trial.u.at(iti, ix) = cur.u.at(iti, ix) + alpha * P.at(iti, ix);
            if (diffeo_ok(trial.u)) {
                gr2 = energy_gradient(trial);
                if (gr2.energy <= gr.energy + 1e-4 * alpha * gTp) {
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) throw NoConvergence("find_critical_path: line search failed");
        cur.u = trial.u;
        gr = gr2;
        ScalarField2D Rn = gr.grad;
        for (double& v : Rn.values) v = -v;
        ScalarField2D Zn = precondition(Rn);
        // Polak-Ribiere+ with automatic restart
        double rzn = dot_interior(Rn, Zn);
        double ry = rzn - dot_interior(Rn, Z);
        double beta = std::max(0.0, ry / rz);
        for (std::size_t i = 0; i < P.values.size(); ++i)
            P.values[i] = Zn.values[i] + beta * P.values[i];
        R = std::move(Rn);
        Z = std::move(Zn);
        rz = rzn;
        gmax = grad_max_interior(gr.grad);
        ++it_count;
    }
    if (gmax > tol) throw NoConvergence("find_critical_path: gradient tolerance not reached");
    out.path = std::move(cur);
    out.iterations = it_count;
    out.grad_max = gmax;
    out.energy = gr.energy;
    return out;
}

SaddleReport verify_saddle(const DiffPath& path, const SeminormOrder& order, double eps) {
    SaddleReport rep;
    rep.grad_max = grad_max_interior(energy_gradient(path).grad);
    if (rep.grad_max > 1e-8)
        throw InvariantError("verify_saddle: path is not stationary (gradient too large)");
    rep.rep = perturb(path, order, eps, 1);
    return rep;
}

} // namespace virlab
