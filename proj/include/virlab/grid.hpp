#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "virlab/errors.hpp"

namespace virlab {

/// Uniform grid on [0,T] x [-x_max, x_max].
/// Time index runs over n_t samples, space index over n_x samples;
/// x samples are symmetric about 0 by construction.
struct GridSpec {
    int n_t = 0;
    int n_x = 0;
    double T = 0.0;
    double x_max = 0.0;

    GridSpec() = default;
    GridSpec(int nt, int nx, double T_, double xmax) : n_t(nt), n_x(nx), T(T_), x_max(xmax) {
        if (n_t < 5) throw InvariantError("GridSpec: n_t must be >= 5");
        if (n_x < 9) throw InvariantError("GridSpec: n_x must be >= 9");
        if (!(T > 0.0) || !(x_max > 0.0)) throw InvariantError("GridSpec: T and x_max must be positive");
    }

    double dt() const { return T / (n_t - 1); }
    double dx() const { return 2.0 * x_max / (n_x - 1); }
    double t(int i) const { return T * i / (n_t - 1); }
    double x(int j) const { return -x_max + 2.0 * x_max * j / (n_x - 1); }
    std::size_t size() const { return std::size_t(n_t) * std::size_t(n_x); }

    bool operator==(const GridSpec& o) const {
        return n_t == o.n_t && n_x == o.n_x && T == o.T && x_max == o.x_max;
    }
};

/// Dense real field sampled on a GridSpec, row-major (time-major).
struct ScalarField2D {
    GridSpec grid;
    std::vector<double> values;  // values[it * n_x + ix]

    ScalarField2D() = default;
    explicit ScalarField2D(const GridSpec& g) : grid(g), values(g.size(), 0.0) {}

    double& at(int it, int ix) { return values[std::size_t(it) * grid.n_x + ix]; }
    double at(int it, int ix) const { return values[std::size_t(it) * grid.n_x + ix]; }
    const double* row(int it) const { return values.data() + std::size_t(it) * grid.n_x; }
    double* row(int it) { return values.data() + std::size_t(it) * grid.n_x; }

    void check_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) throw InvariantError("ScalarField2D: non-finite value");
    }
};

/// Sample an analytic function f(t,x) onto the grid.
ScalarField2D sample(const GridSpec& g, const std::function<double(double, double)>& f);

} // namespace virlab
