#include "virlab/spline.hpp"

#include <algorithm>
#include <cmath>

#include "virlab/kernels.hpp"

namespace virlab {

// --------------------------- not-a-knot cubic -------------------------------
//
// Unknowns are the knot second derivatives M_i. With uniform spacing the
// not-a-knot conditions reduce to M_0 - 2 M_1 + M_2 = 0 (and mirrored), which
// combined with the first interior continuity row gives M_1 and M_{n-2} in
// closed form; the remaining system is strictly tridiagonal.

void CubicSpline::solve_m(std::span<const double> y, double h, std::span<double> m) {
    const int n = int(y.size());
    if (n < 5) throw InvariantError("CubicSpline: need at least 5 nodes");
    const double h2 = h * h;
    auto rhs = [&](int i) { return 6.0 * (y[i - 1] - 2.0 * y[i] + y[i + 1]) / h2; };

    m[1] = rhs(1) / 6.0;
    m[n - 2] = rhs(n - 2) / 6.0;

    // tridiagonal for M_2 .. M_{n-3}: M_{i-1} + 4 M_i + M_{i+1} = rhs(i)
    const int k = n - 4;  // unknown count
    if (k == 1) {
        m[2] = (rhs(2) - m[1] - m[3]) / 4.0;
    } else {
        std::vector<double> c(k), d(k);
        // rows i = 2 .. n-3 mapped to 0 .. k-1
        c[0] = 1.0 / 4.0;
        d[0] = (rhs(2) - m[1]) / 4.0;
        for (int r = 1; r < k; ++r) {
            const int i = 2 + r;
            double rv = rhs(i);
            if (r == k - 1) rv -= m[n - 2];
            const double piv = 4.0 - c[r - 1];
            c[r] = 1.0 / piv;
            d[r] = (rv - d[r - 1]) / piv;
        }
        m[n - 3] = d[k - 1];
        for (int r = k - 2; r >= 0; --r) m[2 + r] = d[r] - c[r] * m[2 + r + 1];
    }
    m[0] = 2.0 * m[1] - m[2];
    m[n - 1] = 2.0 * m[n - 2] - m[n - 3];
}

CubicSpline::CubicSpline(double x0, double h, std::span<const double> y)
    : x0_(x0), h_(h), y_(y.begin(), y.end()), m_(y.size()) {
    solve_m(y, h, m_);
}

namespace {
inline int locate(double x, double x0, double h, int n) {
    int i = int(std::floor((x - x0) / h));
    return std::clamp(i, 0, n - 2);
}

// (x - i*h)/h accumulates O(n*eps) rounding; snap so node values reproduce
// bitwise
inline double snap_theta(double th, int n) {
    const double thr = 64.0 * 2.2e-16 * n;
    if (th < thr) return 0.0;
    if (th > 1.0 - thr) return 1.0;
    return th;
}
} // namespace

double CubicSpline::operator()(double x) const {
    const int n = int(y_.size());
    const int i = locate(x, x0_, h_, n);
    const double th = snap_theta((x - (x0_ + i * h_)) / h_, n);
    if (th == 0.0) return y_[i];
    if (th == 1.0) return y_[i + 1];
    const double om = 1.0 - th;
    return y_[i] * om + y_[i + 1] * th +
           h_ * h_ / 6.0 * ((th * th * th - th) * m_[i + 1] + (om * om * om - om) * m_[i]);
}

double CubicSpline::derivative(double x) const {
    const int n = int(y_.size());
    const int i = locate(x, x0_, h_, n);
    const double th = (x - (x0_ + i * h_)) / h_;
    const double om = 1.0 - th;
    return (y_[i + 1] - y_[i]) / h_ +
           h_ / 6.0 * ((3.0 * th * th - 1.0) * m_[i + 1] - (3.0 * om * om - 1.0) * m_[i]);
}

// ------------------------------ ColumnSplines -------------------------------

ColumnSplines::ColumnSplines(double t0, double dt, int n_t, int n_cols)
    : t0_(t0), dt_(dt), n_t_(n_t), n_cols_(n_cols),
      y_(std::size_t(n_t) * n_cols), m_(std::size_t(n_t) * n_cols) {}

void ColumnSplines::set_column(int j, std::span<const double> y) {
    std::copy(y.begin(), y.end(), y_.begin() + std::size_t(j) * n_t_);
}

void ColumnSplines::finalize() {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n_cols_; ++j) {
        std::span<const double> y(y_.data() + std::size_t(j) * n_t_, n_t_);
        std::span<double> m(m_.data() + std::size_t(j) * n_t_, n_t_);
        CubicSpline::solve_m(y, dt_, m);
    }
}

double ColumnSplines::eval(int j, double t) const {
    const double* y = y_.data() + std::size_t(j) * n_t_;
    const double* m = m_.data() + std::size_t(j) * n_t_;
    const int i = locate(t, t0_, dt_, n_t_);
    const double th = snap_theta((t - (t0_ + i * dt_)) / dt_, n_t_);
    if (th == 0.0) return y[i];
    if (th == 1.0) return y[i + 1];
    const double om = 1.0 - th;
    return y[i] * om + y[i + 1] * th +
           dt_ * dt_ / 6.0 * ((th * th * th - th) * m[i + 1] + (om * om * om - om) * m[i]);
}

// ----------------------------- MonotoneHermite ------------------------------

MonotoneHermite::MonotoneHermite(double x0, double h, std::span<const double> y, bool enforce)
    : x0_(x0), h_(h), y_(y.begin(), y.end()), d_(y.size()) {
    const int n = int(y_.size());
    if (n < 5) throw InvariantError("MonotoneHermite: need at least 5 nodes");
    DerivPlan plan = DerivPlan::build(n, h, 1);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < plan.width[i]; ++j) acc += plan.w[i][j] * y_[plan.start[i] + j];
        d_[i] = acc;
    }
    if (!enforce) return;
    // Hyman-style limiter: keeps 4th-order accuracy where the data leaves
    // slack and guarantees monotone intervals otherwise. Only meaningful for
    // monotone data (the caller's contract).
    const bool inc = y_[n - 1] >= y_[0];
    for (int i = 0; i < n; ++i) {
        const double dl = i > 0 ? (y_[i] - y_[i - 1]) / h : (y_[i + 1] - y_[i]) / h;
        const double dr = i < n - 1 ? (y_[i + 1] - y_[i]) / h : dl;
        const double cap = 3.0 * std::min(std::abs(dl), std::abs(dr));
        d_[i] = inc ? std::clamp(d_[i], 0.0, cap) : std::clamp(d_[i], -cap, 0.0);
    }
}

double MonotoneHermite::operator()(double x) const {
    const int n = int(y_.size());
    const int i = locate(x, x0_, h_, n);
    const double th = snap_theta((x - (x0_ + i * h_)) / h_, n);
    if (th == 0.0) return y_[i];
    if (th == 1.0) return y_[i + 1];
    const double h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
    const double h10 = th * (1.0 - th) * (1.0 - th);
    const double h01 = th * th * (3.0 - 2.0 * th);
    const double h11 = th * th * (th - 1.0);
    return h00 * y_[i] + h10 * h_ * d_[i] + h01 * y_[i + 1] + h11 * h_ * d_[i + 1];
}

double MonotoneHermite::derivative(double x) const {
    const int n = int(y_.size());
    const int i = locate(x, x0_, h_, n);
    const double th = (x - (x0_ + i * h_)) / h_;
    const double g00 = 6.0 * th * (th - 1.0);
    const double g10 = (1.0 - th) * (1.0 - 3.0 * th);
    const double g01 = -g00;
    const double g11 = th * (3.0 * th - 2.0);
    return (g00 * y_[i] + g01 * y_[i + 1]) / h_ + g10 * d_[i] + g11 * d_[i + 1];
}


// ------------------------------ DiffeoInterp --------------------------------

DiffeoInterp::DiffeoInterp(double x0, double h, std::span<const double> u)
    : x0_(x0), h_(h), u_(u.begin(), u.end()), d_(u.size()) {
    const int n = int(u_.size());
    if (n < 5) throw InvariantError("DiffeoInterp: need at least 5 nodes");
    DerivPlan plan = DerivPlan::build(n, h, 1);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < plan.width[i]; ++j) acc += plan.w[i][j] * u_[plan.start[i] + j];
        d_[i] = acc;
    }
    // phi-space Fritsch-Carlson caps: phi-slope 1 + d must lie in
    // [0, 3 min(neighbor secants)]
    for (int i = 0; i < n; ++i) {
        const double sl = i > 0 ? 1.0 + (u_[i] - u_[i - 1]) / h : 1.0 + (u_[i + 1] - u_[i]) / h;
        const double sr = i < n - 1 ? 1.0 + (u_[i + 1] - u_[i]) / h : sl;
        const double cap = 3.0 * std::min(sl, sr) - 1.0;
        d_[i] = std::clamp(d_[i], -1.0, std::max(cap, -1.0));
    }
}

double DiffeoInterp::displacement(double y) const {
    const int n = int(u_.size());
    if (y <= x_min() || y >= x_max()) return 0.0;
    const int i = locate(y, x0_, h_, n);
    const double th = snap_theta((y - (x0_ + i * h_)) / h_, n);
    if (th == 0.0) return u_[i];
    if (th == 1.0) return u_[i + 1];
    const double h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
    const double h10 = th * (1.0 - th) * (1.0 - th);
    const double h01 = th * th * (3.0 - 2.0 * th);
    const double h11 = th * th * (th - 1.0);
    return h00 * u_[i] + h10 * h_ * d_[i] + h01 * u_[i + 1] + h11 * h_ * d_[i + 1];
}

double DiffeoInterp::phi(double y) const { return y + displacement(y); }

double DiffeoInterp::phi_prime(double y) const {
    const int n = int(u_.size());
    if (y <= x_min() || y >= x_max()) return 1.0;
    const int i = locate(y, x0_, h_, n);
    const double th = (y - (x0_ + i * h_)) / h_;
    const double g00 = 6.0 * th * (th - 1.0);
    const double g10 = (1.0 - th) * (1.0 - 3.0 * th);
    const double g11 = th * (3.0 * th - 2.0);
    return 1.0 + (g00 * u_[i] - g00 * u_[i + 1]) / h_ + g10 * d_[i] + g11 * d_[i + 1];
}

} // namespace virlab
