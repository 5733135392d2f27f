#pragma once

// Discrete calculus on rapidly decaying fields: high-order partial
// derivatives, Simpson quadrature, the weighted sup seminorms
//   ||f||_{S^{k,m,n}} = sum_{i<=m, j<=n} sup (1+x^2)^k |d_x^i d_t^j f|
// and the unweighted C^{m,n} variant.

#include <vector>

#include "virlab/grid.hpp"
#include "virlab/kernels.hpp"

namespace virlab {

enum class Axis { time, space };

struct SeminormOrder {
    int k = 0;  // weight exponent
    int m = 0;  // max space-derivative order
    int n = 0;  // max time-derivative order

    SeminormOrder() = default;
    SeminormOrder(int k_, int m_, int n_) : k(k_), m(m_), n(n_) {
        if (k < 0 || m < 0 || n < 0) throw InvariantError("SeminormOrder: negative order");
        if (m > 4 || n > 4) throw StencilError("SeminormOrder: derivative order beyond stencil limit");
    }
};

/// d^order along `axis`; 4th-order accurate, one-sided at boundaries,
/// exact for polynomials up to degree 4 per axis.
ScalarField2D partial_derivative(const ScalarField2D& f, Axis axis, int order);

/// Composite Simpson. integrate_at_t returns one value per time node,
/// integrate the full space-time integral.
std::vector<double> integrate_at_t(const ScalarField2D& f);
double integrate(const ScalarField2D& f);  // space_time

double seminorm_S(const ScalarField2D& f, const SeminormOrder& order);
double sup_norm_C(const ScalarField2D& f, int m, int n);

} // namespace virlab
