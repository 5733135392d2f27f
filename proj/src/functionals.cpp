#include "virlab/functionals.hpp"

#include <cmath>

#include "virlab/grid_field.hpp"

namespace virlab {

namespace {

ScalarField2D energy_density(const DiffPath& p) {
    ScalarField2D pt = derivative_time(p.u, 1);
    ScalarField2D px = derivative_space(p.u, 1);
    ScalarField2D out(p.grid);
    const std::size_t n = out.values.size();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)n; ++i)
        out.values[i] = pt.values[i] * pt.values[i] * (1.0 + px.values[i]);
    return out;
}

ScalarField2D defect_density(const DiffPath& p) {
    ScalarField2D ptx = derivative_space(derivative_time(p.u, 1), 1);
    ScalarField2D pxx = derivative_space(p.u, 2);
    ScalarField2D px = derivative_space(p.u, 1);
    ScalarField2D out(p.grid);
    const std::size_t n = out.values.size();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)n; ++i) {
        const double fx = 1.0 + px.values[i];
        out.values[i] = ptx.values[i] * pxx.values[i] / (fx * fx);
    }
    return out;
}

} // namespace

double energy_diff(const DiffPath& path) { return integrate(energy_density(path)); }

std::vector<double> speed2_profile(const DiffPath& path) {
    return integrate_at_t(energy_density(path));
}

std::vector<double> defect_profile(const DiffPath& path) {
    return integrate_at_t(defect_density(path));
}

double central_defect(const DiffPath& path) {
    return integrate_1d(defect_profile(path), path.grid.dt());
}

std::vector<double> derivative_series(const std::vector<double>& v, double h, int order) {
    DerivPlan plan = DerivPlan::build(int(v.size()), h, order);
    std::vector<double> out(v.size());
    for (int i = 0; i < plan.n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < plan.width[i]; ++j) acc += plan.w[i][j] * v[plan.start[i] + j];
        out[i] = acc;
    }
    return out;
}

double energy_virasoro(const VirasoroPath& vp) {
    const double dt = vp.path.grid.dt();
    std::vector<double> at = derivative_series(vp.alpha, dt, 1);
    std::vector<double> d = defect_profile(vp.path);
    std::vector<double> sq(at.size());
    for (std::size_t i = 0; i < at.size(); ++i) {
        const double r = at[i] - d[i];
        sq[i] = r * r;
    }
    return energy_diff(vp.path) + integrate_1d(sq, dt);
}

double length_diff(const DiffPath& path) {
    std::vector<double> s2 = speed2_profile(path);
    std::vector<double> v(s2.size());
    for (std::size_t i = 0; i < s2.size(); ++i) v[i] = std::sqrt(std::max(s2[i], 0.0));
    return integrate_1d(v, path.grid.dt());
}

} // namespace virlab
