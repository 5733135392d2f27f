#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "virlab/diffpath.hpp"
#include "virlab/kernels.hpp"

using namespace virlab;

namespace {

ScalarField2D random_field(const GridSpec& g, std::uint64_t seed) {
    SplitMix64 rng(seed);
    ScalarField2D f(g);
    for (double& v : f.values) v = rng.uniform(-1.0, 1.0);
    return f;
}

} // namespace

TEST_CASE("fd_weights reproduces the classical central stencils") {
    const double nodes[] = {-2, -1, 0, 1, 2};
    auto w = fd_weights(0.0, std::span<const double>(nodes, 5), 1);
    const double expect[] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
    for (int i = 0; i < 5; ++i) CHECK(w[i] == doctest::Approx(expect[i]).epsilon(1e-14));
    auto w2 = fd_weights(0.0, std::span<const double>(nodes, 5), 2);
    const double expect2[] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
    for (int i = 0; i < 5; ++i) CHECK(w2[i] == doctest::Approx(expect2[i]).epsilon(1e-14));
}

TEST_CASE("derivatives are exact for degree-4 polynomials per axis") {
    GridSpec g(21, 33, 2.0, 4.0);
    ScalarField2D f = sample(g, [](double t, double x) {
        return 1.0 + t + t * t * t * t + x + 0.5 * x * x * x * x;
    });
    for (int order = 1; order <= 4; ++order) {
        // rounding floor at this grid and data scale (one-sided stencil
        // weights grow like 1/h^order and cancel catastrophically)
        static const double tol_by_order[] = {0.0, 1e-11, 1e-9, 1e-7, 1e-5};
        const double tol = tol_by_order[order];
        ScalarField2D dx = derivative_space(f, order);
        ScalarField2D dt = derivative_time(f, order);
        double worst = 0.0;
        for (int it = 0; it < g.n_t; ++it)
            for (int ix = 0; ix < g.n_x; ++ix) {
                const double x = g.x(ix), t = g.t(it);
                double ex_x = 0, ex_t = 0;
                switch (order) {
                    case 1: ex_x = 1 + 2.0 * x * x * x; ex_t = 1 + 4 * t * t * t; break;
                    case 2: ex_x = 6.0 * x * x; ex_t = 12 * t * t; break;
                    case 3: ex_x = 12.0 * x; ex_t = 24 * t; break;
                    case 4: ex_x = 12.0; ex_t = 24; break;
                }
                worst = std::max(worst, std::abs(dx.at(it, ix) - ex_x));
                worst = std::max(worst, std::abs(dt.at(it, ix) - ex_t));
            }
        CHECK(worst < tol);
    }
}

TEST_CASE("d/dx of x^2 is 2x at every node, exact to rounding") {
    GridSpec g(5, 41, 1.0, 4.0);
    ScalarField2D f = sample(g, [](double, double x) { return x * x; });
    ScalarField2D d = derivative_space(f, 1);
    for (int ix = 0; ix < g.n_x; ++ix)
        CHECK(d.at(2, ix) == doctest::Approx(2.0 * g.x(ix)).epsilon(1e-13).scale(1.0));
}

#ifdef _OPENMP
TEST_CASE("results are independent of the OpenMP thread count") {
    GridSpec g(41, 127, 1.3, 6.0);
    ScalarField2D f = random_field(g, 99);
    omp_set_num_threads(1);
    ScalarField2D d1 = derivative_space(f, 2);
    const double i1 = integrate_space_time(f);
    const double m1 = weighted_abs_max(f, 1);
    omp_set_num_threads(2);
    ScalarField2D d2 = derivative_space(f, 2);
    CHECK(d1.values == d2.values);
    CHECK(i1 == integrate_space_time(f));
    CHECK(m1 == weighted_abs_max(f, 1));
}
#endif

TEST_CASE("zero field differentiates and integrates to zero") {
    GridSpec g(11, 17, 1.0, 5.0);
    ScalarField2D z(g);
    CHECK(weighted_abs_max(derivative_space(z, 3), 0) == 0.0);
    CHECK(weighted_abs_max(derivative_time(z, 2), 0) == 0.0);
    CHECK(integrate_space_time(z) == 0.0);
}

TEST_CASE("derivative of sin(x) converges at 4th order") {
    // the spec's refinement-study oracle: measure C at two resolutions
    double errs[2];
    int k = 0;
    for (int nx : {401, 801}) {
        GridSpec g(5, nx, 1.0, 10.0);
        ScalarField2D f = sample(g, [](double, double x) { return std::sin(x); });
        ScalarField2D d = derivative_space(f, 1);
        double err = 0.0;
        for (int ix = 0; ix < g.n_x; ++ix)
            err = std::max(err, std::abs(d.at(2, ix) - std::cos(g.x(ix))));
        errs[k++] = err;
    }
    const double rate = std::log2(errs[0] / errs[1]);
    CHECK(rate > 3.6);
    // frozen from the refinement study: C = err / dx^4 stays near 0.007
    const double c0 = errs[0] / std::pow(20.0 / 400, 4);
    CHECK(c0 < 0.5);  // boundary stencils dominate the constant
}

TEST_CASE("Simpson handles the arctan tail and the Gaussian integral") {
    {
        GridSpec g(5, 2001, 1.0, 50.0);
        ScalarField2D f = sample(g, [](double, double x) { return 1.0 / (1.0 + x * x); });
        std::vector<double> rows = integrate_space_at_t(f);
        const double expect = M_PI - 2.0 * std::atan(1.0 / 50.0);
        for (double v : rows) CHECK(std::abs(v - expect) < 1e-6);
    }
    {
        GridSpec g(21, 801, 1.0, 8.0);
        ScalarField2D f = sample(g, [](double, double x) { return std::exp(-x * x); });
        CHECK(std::abs(integrate_space_time(f) - std::sqrt(M_PI)) < 1e-10);
    }
}

TEST_CASE("even node counts fall back to a trapezoid panel") {
    std::vector<double> v(10);
    for (int i = 0; i < 10; ++i) {
        const double x = i / 9.0;
        v[i] = x * x;
    }
    const double got = integrate_1d(v, 1.0 / 9.0);
    CHECK(got == doctest::Approx(1.0 / 3.0).epsilon(5e-3));
}

TEST_CASE("parallel kernels match the serial reference bitwise") {
    GridSpec g(41, 127, 1.3, 6.0);
    ScalarField2D f = random_field(g, 42);
    for (int order : {1, 2, 3, 4}) {
        ScalarField2D a = derivative_time(f, order);
        ScalarField2D b = serial::derivative_time(f, order);
        CHECK(a.values == b.values);
        ScalarField2D c = derivative_space(f, order);
        ScalarField2D d = serial::derivative_space(f, order);
        CHECK(c.values == d.values);
    }
    CHECK(integrate_space_time(f) == serial::integrate_space_time(f));
    CHECK(integrate_space_at_t(f) == serial::integrate_space_at_t(f));
    CHECK(weighted_abs_max(f, 2) == serial::weighted_abs_max(f, 2));
}

TEST_CASE("stencil errors are reported") {
    GridSpec g(5, 9, 1.0, 1.0);
    ScalarField2D f(g);
    CHECK_THROWS_AS(derivative_time(f, 5), StencilError);
    CHECK_THROWS_AS(derivative_time(f, 3), StencilError);  // n_t = 5 < 7
    CHECK_NOTHROW(derivative_time(f, 1));
}
