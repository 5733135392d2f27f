#pragma once

// 1-d interpolation used across the library:
//  - CubicSpline: not-a-knot cubic spline on a uniform axis (C^2, exact for
//    cubics, reproduces node values bitwise). Used for off-grid evaluation in
//    time.
//  - MonotoneHermite: cubic Hermite with 4th-order slope estimates and a
//    Hyman-style monotonicity limiter. Used for composing diffeomorphisms,
//    where overshoot would break the diffeomorphism property.

#include <span>
#include <vector>

#include "virlab/errors.hpp"

namespace virlab {

class CubicSpline {
public:
    CubicSpline() = default;
    /// Build over nodes x_i = x0 + i*h from values y (n >= 5).
    CubicSpline(double x0, double h, std::span<const double> y);

    double operator()(double x) const;
    double derivative(double x) const;

    /// Second-derivative knot values (shared tridiagonal solve, exposed for
    /// the batched builder).
    static void solve_m(std::span<const double> y, double h, std::span<double> m);

private:
    double x0_ = 0.0, h_ = 0.0;
    std::vector<double> y_, m_;
};

/// Not-a-knot splines for every column of a time-major field, built with one
/// factorization pass. Column index = space index.
class ColumnSplines {
public:
    ColumnSplines(double t0, double dt, int n_t, int n_cols);

    /// Set column values (length n_t) for column j.
    void set_column(int j, std::span<const double> y);
    /// Finish construction (solves all columns; OpenMP-parallel).
    void finalize();

    double eval(int j, double t) const;

    int n_t() const { return n_t_; }

private:
    double t0_, dt_;
    int n_t_, n_cols_;
    std::vector<double> y_, m_;  // column-major storage [j * n_t + i]
};

/// Interpolant of a diffeomorphism phi = x + u built on the displacement
/// samples (avoids the |x|-scale rounding of interpolating phi directly).
/// Slopes are 4th-order estimates capped so that phi stays monotone
/// (Fritsch-Carlson condition in phi-space); evaluation extends by the
/// identity outside the sampled window.
class DiffeoInterp {
public:
    DiffeoInterp() = default;
    DiffeoInterp(double x0, double h, std::span<const double> u);

    /// phi(y) = y + u(y)
    double phi(double y) const;
    /// phi'(y)
    double phi_prime(double y) const;
    /// just the displacement
    double displacement(double y) const;

    double x_min() const { return x0_; }
    double x_max() const { return x0_ + h_ * (double(u_.size()) - 1.0); }

private:
    double x0_ = 0.0, h_ = 0.0;
    std::vector<double> u_, d_;
};

class MonotoneHermite {
public:
    MonotoneHermite() = default;
    /// Build over x_i = x0 + i*h from values y; if `enforce_monotone`, slopes
    /// are limited so the interpolant preserves strict monotonicity of y.
    MonotoneHermite(double x0, double h, std::span<const double> y, bool enforce_monotone = true);

    double operator()(double x) const;
    double derivative(double x) const;

    double x_min() const { return x0_; }
    double x_max() const { return x0_ + h_ * (double(y_.size()) - 1.0); }

private:
    double x0_ = 0.0, h_ = 0.0;
    std::vector<double> y_, d_;
};

} // namespace virlab
