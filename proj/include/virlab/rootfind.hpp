#pragma once

// Safeguarded Newton for strictly monotone scalar equations: keeps a bracket
// and bisects whenever the Newton step leaves it.

#include <algorithm>
#include <cmath>
#include <utility>

#include "virlab/errors.hpp"

namespace virlab {

/// Solve F(s) = 0 for increasing F on [lo, hi]; FD must return (F, F').
/// Returns s with |F(s)| <= f_tol, or the best point seen once the bracket
/// collapses to rounding width.
template <class FD>
double monotone_root(FD&& fd, double lo, double hi, double s0, double f_tol = 1e-13) {
    double s = std::min(std::max(s0, lo), hi);
    double best_s = s, best_f = std::abs(fd(s).first);
    for (int it = 0; it < 200; ++it) {
        auto [f, df] = fd(s);
        if (std::abs(f) < best_f) {
            best_f = std::abs(f);
            best_s = s;
        }
        if (std::abs(f) <= f_tol) return s;
        if (f > 0.0)
            hi = s;
        else
            lo = s;
        const double width_floor =
            8.0 * 2.3e-16 * std::max({std::abs(lo), std::abs(hi), 1e-30});
        if (hi - lo <= width_floor) return best_s;
        double step = df != 0.0 ? s - f / df : lo - 1.0;
        if (!(step > lo) || !(step < hi)) step = 0.5 * (lo + hi);
        s = step;
    }
    throw NoRoot("monotone_root: no convergence");
}

} // namespace virlab
