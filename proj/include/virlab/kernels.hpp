#pragma once

// Grid kernels: finite-difference stencils, Simpson quadrature, weighted
// max reductions. Each kernel has an OpenMP-parallel implementation and a
// serial reference (namespace serial) used by the tests and the benchmark.
//
// Determinism contract: for a fixed input the parallel and serial paths
// produce bit-identical results. Reductions are organized as per-row
// partials (each row summed left to right) combined sequentially, so the
// result does not depend on the number of threads.

#include <span>
#include <vector>

#include "virlab/grid.hpp"

namespace virlab {

/// Finite-difference weights for d^m/dx^m at z over arbitrary nodes (Fornberg).
std::vector<double> fd_weights(double z, std::span<const double> nodes, int m);

/// Per-node stencil of an order-4-accurate derivative on a uniform axis:
/// centered in the interior, one-sided (width order+4) at the boundaries.
struct DerivPlan {
    int n = 0;
    int order = 0;
    std::vector<int> start;              // window start per node
    std::vector<int> width;              // window width per node
    std::vector<std::vector<double>> w;  // weights per node

    static DerivPlan build(int n, double h, int order);
};

// Parallel kernels ----------------------------------------------------------

/// d^order/dt^order along the time axis, 4th-order accurate.
ScalarField2D derivative_time(const ScalarField2D& f, int order);
/// d^order/dx^order along the space axis, 4th-order accurate.
ScalarField2D derivative_space(const ScalarField2D& f, int order);

/// Composite Simpson weights (trapezoid fallback on the last panel when the
/// node count is even).
std::vector<double> simpson_weights(int n, double h);

/// Simpson integral over x for each time node.
std::vector<double> integrate_space_at_t(const ScalarField2D& f);
/// Simpson x then Simpson t.
double integrate_space_time(const ScalarField2D& f);

/// max over nodes of (1+x^2)^k |f|.
double weighted_abs_max(const ScalarField2D& f, int k);

/// Simpson integral of a 1-d sampled function.
double integrate_1d(std::span<const double> v, double h);

// Serial reference ----------------------------------------------------------

namespace serial {
ScalarField2D derivative_time(const ScalarField2D& f, int order);
ScalarField2D derivative_space(const ScalarField2D& f, int order);
std::vector<double> integrate_space_at_t(const ScalarField2D& f);
double integrate_space_time(const ScalarField2D& f);
double weighted_abs_max(const ScalarField2D& f, int k);
} // namespace serial

} // namespace virlab
