#pragma once

// Paths of diffeomorphisms phi(t,x) = x + u(t,x) on the truncated grid, and
// single time slices. Displacements must decay at the spatial boundary (the
// Schwartz-tail proxy) and each slice must be orientation preserving.

#include <cstdint>
#include <vector>

#include "virlab/grid.hpp"
#include "virlab/kernels.hpp"

namespace virlab {

inline constexpr double kTailTolDefault = 1e-10;

/// One diffeomorphism of the line: x + u(x) on n uniform samples of
/// [-x_max, x_max].
struct Diffeo1D {
    int n = 0;
    double x_max = 0.0;
    std::vector<double> u;

    Diffeo1D() = default;
    Diffeo1D(int n_, double xmax) : n(n_), x_max(xmax), u(n_, 0.0) {
        if (n < 9) throw InvariantError("Diffeo1D: need at least 9 samples");
    }

    double h() const { return 2.0 * x_max / (n - 1); }
    double x(int i) const { return -x_max + 2.0 * x_max * i / (n - 1); }
    double phi(int i) const { return x(i) + u[i]; }

    /// 1 + u_x at the nodes (4th-order stencils).
    std::vector<double> phi_x() const;

    /// Throws NotDiffeo / TailError when the invariants fail.
    void validate(double tail_tol = kTailTolDefault) const;
};

struct DiffPath {
    GridSpec grid;
    ScalarField2D u;  // displacement; phi = x + u

    DiffPath() = default;
    explicit DiffPath(const GridSpec& g) : grid(g), u(g) {}
    DiffPath(const GridSpec& g, ScalarField2D field) : grid(g), u(std::move(field)) {}

    double phi(int it, int ix) const { return grid.x(ix) + u.at(it, ix); }

    void validate(double tail_tol = kTailTolDefault) const;

    Diffeo1D time_slice(int it) const;
};

/// Cubic-spline (not-a-knot) value of phi(., x_j) at off-grid time t.
double interpolate_time(const DiffPath& path, double t, int x_index);

// ----------------------- deterministic path families -----------------------

/// phi = x + A sin(pi t/T) e^{-x^2}: a loop from Id back to Id through the
/// Gaussian test diffeo.
DiffPath gaussian_loop_path(const GridSpec& g, double amplitude = 0.1);

/// phi = x + A (t/T + b sin^2(pi t/T)) e^{-x^2}: monotone in t with a
/// genuinely non-constant speed profile for b != 0.
DiffPath gaussian_ramp_path(const GridSpec& g, double amplitude = 0.1, double b = 0.15);

/// Seeded random non-constant path: sum of three time-modulated Gaussians,
/// displacement small enough that phi_x > 0 holds with margin.
DiffPath random_path(const GridSpec& g, std::uint64_t seed);

/// Seeded random small-displacement diffeomorphism:
/// u(x) = sum_{i=1..3} c_i exp(-(x-a_i)^2), |c_i| <= 0.05, |a_i| <= 3.
Diffeo1D random_diffeo(int n, double x_max, std::uint64_t seed);

/// Right translation by a time-independent diffeomorphism:
/// (phi o eta)(t,x) = phi(t, eta(x)), sampled via monotone interpolation of
/// each time slice.
DiffPath compose_spatial(const DiffPath& path, const Diffeo1D& eta);

// --------------------------------- RNG --------------------------------------

/// splitmix64: tiny, deterministic across platforms.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    /// uniform in [lo, hi)
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (next() >> 11) * 0x1.0p-53;
    }
};

} // namespace virlab
