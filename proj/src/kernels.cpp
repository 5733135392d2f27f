#include "virlab/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace virlab {

ScalarField2D sample(const GridSpec& g, const std::function<double(double, double)>& f) {
    ScalarField2D out(g);
#pragma omp parallel for schedule(static)
    for (int it = 0; it < g.n_t; ++it) {
        double* row = out.row(it);
        const double t = g.t(it);
        for (int ix = 0; ix < g.n_x; ++ix) row[ix] = f(t, g.x(ix));
    }
    return out;
}

std::vector<double> fd_weights(double z, std::span<const double> x, int m) {
    // Fornberg's algorithm (Math. Comp. 51, 1988).
    const int n = int(x.size());
    std::vector<double> c(std::size_t(n) * (m + 1), 0.0);
    auto C = [&](int i, int k) -> double& { return c[std::size_t(i) * (m + 1) + k]; };
    double c1 = 1.0;
    double c4 = x[0] - z;
    C(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
                C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
            C(j, 0) = c4 * C(j, 0) / c3;
        }
        c1 = c2;
    }
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = C(i, m);
    return out;
}

DerivPlan DerivPlan::build(int n, double h, int order) {
    if (order < 1 || order > 4) throw StencilError("derivative order must be in 1..4");
    const int half = order <= 2 ? 2 : 3;
    const int Wc = 2 * half + 1;
    const int Wb = order + 4;
    if (n < std::max(Wc, Wb)) throw StencilError("grid too small for the stencil");
    DerivPlan p;
    p.n = n;
    p.order = order;
    p.start.resize(n);
    p.width.resize(n);
    p.w.resize(n);
    std::vector<double> nodes(std::max(Wc, Wb));
    for (int i = 0; i < n; ++i) {
        int s, W;
        if (i >= half && i <= n - 1 - half) {
            s = i - half;
            W = Wc;
        } else if (i < half) {
            s = 0;
            W = Wb;
        } else {
            s = n - Wb;
            W = Wb;
        }
        for (int j = 0; j < W; ++j) nodes[j] = (s + j - i) * h;  // relative to node i
        p.start[i] = s;
        p.width[i] = W;
        p.w[i] = fd_weights(0.0, std::span<const double>(nodes.data(), W), order);
    }
    return p;
}

namespace {

// time derivative: output row i is a weighted combination of input rows
template <bool Parallel>
ScalarField2D deriv_time_impl(const ScalarField2D& f, int order) {
    const GridSpec& g = f.grid;
    DerivPlan plan = DerivPlan::build(g.n_t, g.dt(), order);
    ScalarField2D out(g);
#pragma omp parallel for schedule(static) if (Parallel)
    for (int it = 0; it < g.n_t; ++it) {
        double* o = out.row(it);
        const int s = plan.start[it];
        const int W = plan.width[it];
        const double* wt = plan.w[it].data();
        for (int j = 0; j < W; ++j) {
            const double* in = f.row(s + j);
            const double c = wt[j];
            for (int ix = 0; ix < g.n_x; ++ix) o[ix] += c * in[ix];
        }
    }
    return out;
}

template <bool Parallel>
ScalarField2D deriv_space_impl(const ScalarField2D& f, int order) {
    const GridSpec& g = f.grid;
    DerivPlan plan = DerivPlan::build(g.n_x, g.dx(), order);
    ScalarField2D out(g);
#pragma omp parallel for schedule(static) if (Parallel)
    for (int it = 0; it < g.n_t; ++it) {
        const double* in = f.row(it);
        double* o = out.row(it);
        for (int ix = 0; ix < g.n_x; ++ix) {
            const int s = plan.start[ix];
            const int W = plan.width[ix];
            const double* wt = plan.w[ix].data();
            double acc = 0.0;
            for (int j = 0; j < W; ++j) acc += wt[j] * in[s + j];
            o[ix] = acc;
        }
    }
    return out;
}

template <bool Parallel>
std::vector<double> rows_impl(const ScalarField2D& f) {
    const GridSpec& g = f.grid;
    std::vector<double> wx = simpson_weights(g.n_x, g.dx());
    std::vector<double> out(g.n_t);
#pragma omp parallel for schedule(static) if (Parallel)
    for (int it = 0; it < g.n_t; ++it) {
        const double* in = f.row(it);
        double acc = 0.0;
        for (int ix = 0; ix < g.n_x; ++ix) acc += wx[ix] * in[ix];
        out[it] = acc;
    }
    return out;
}

template <bool Parallel>
double max_impl(const ScalarField2D& f, int k) {
    const GridSpec& g = f.grid;
    std::vector<double> wgt(g.n_x);
    for (int ix = 0; ix < g.n_x; ++ix) {
        const double x = g.x(ix);
        wgt[ix] = std::pow(1.0 + x * x, k);
    }
    double best = 0.0;
#pragma omp parallel for schedule(static) reduction(max : best) if (Parallel)
    for (int it = 0; it < g.n_t; ++it) {
        const double* in = f.row(it);
        double m = 0.0;
        for (int ix = 0; ix < g.n_x; ++ix) m = std::max(m, wgt[ix] * std::abs(in[ix]));
        best = std::max(best, m);
    }
    return best;
}

} // namespace

std::vector<double> simpson_weights(int n, double h) {
    if (n < 3) throw InvariantError("simpson_weights: need at least 3 nodes");
    std::vector<double> w(n, 0.0);
    int m = n;
    const bool even = n % 2 == 0;
    if (even) m = n - 1;  // Simpson on the first m nodes, trapezoid on the last panel
    w[0] = h / 3.0;
    w[m - 1] += h / 3.0;
    for (int i = 1; i < m - 1; ++i) w[i] = (i % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
    if (even) {
        w[n - 2] += h / 2.0;
        w[n - 1] += h / 2.0;
    }
    return w;
}

double integrate_1d(std::span<const double> v, double h) {
    std::vector<double> w = simpson_weights(int(v.size()), h);
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += w[i] * v[i];
    return acc;
}

ScalarField2D derivative_time(const ScalarField2D& f, int order) { return deriv_time_impl<true>(f, order); }
ScalarField2D derivative_space(const ScalarField2D& f, int order) { return deriv_space_impl<true>(f, order); }
std::vector<double> integrate_space_at_t(const ScalarField2D& f) { return rows_impl<true>(f); }

double integrate_space_time(const ScalarField2D& f) {
    std::vector<double> rows = rows_impl<true>(f);
    return integrate_1d(rows, f.grid.dt());
}

double weighted_abs_max(const ScalarField2D& f, int k) { return max_impl<true>(f, k); }

namespace serial {
ScalarField2D derivative_time(const ScalarField2D& f, int order) { return deriv_time_impl<false>(f, order); }
ScalarField2D derivative_space(const ScalarField2D& f, int order) { return deriv_space_impl<false>(f, order); }
std::vector<double> integrate_space_at_t(const ScalarField2D& f) { return rows_impl<false>(f); }
double integrate_space_time(const ScalarField2D& f) {
    std::vector<double> rows = rows_impl<false>(f);
    return integrate_1d(rows, f.grid.dt());
}
double weighted_abs_max(const ScalarField2D& f, int k) { return max_impl<false>(f, k); }
} // namespace serial

} // namespace virlab
