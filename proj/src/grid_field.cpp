#include "virlab/grid_field.hpp"

namespace virlab {

ScalarField2D partial_derivative(const ScalarField2D& f, Axis axis, int order) {
    if (order == 0) return f;
    return axis == Axis::time ? derivative_time(f, order) : derivative_space(f, order);
}

std::vector<double> integrate_at_t(const ScalarField2D& f) { return integrate_space_at_t(f); }

double integrate(const ScalarField2D& f) { return integrate_space_time(f); }

double seminorm_S(const ScalarField2D& f, const SeminormOrder& o) {
    double total = 0.0;
    ScalarField2D ft = f;
    for (int j = 0; j <= o.n; ++j) {
        if (j > 0) ft = derivative_time(f, j);
        ScalarField2D fij = ft;
        for (int i = 0; i <= o.m; ++i) {
            if (i > 0) fij = derivative_space(ft, i);
            total += weighted_abs_max(fij, o.k);
        }
    }
    return total;
}

double sup_norm_C(const ScalarField2D& f, int m, int n) {
    return seminorm_S(f, SeminormOrder(0, m, n));
}

} // namespace virlab
