// Acceptance suite: one criterion per invocation (argv[1] in 1..10), or all
// when run without arguments. Prints one PASS/FAIL line per criterion plus
// per-clause details; exits nonzero when the selected criteria fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "virlab/cli_harness.hpp"
#include "virlab/diff_group.hpp"
#include "virlab/functionals.hpp"
#include "virlab/perturb_virasoro.hpp"
#include "virlab/reparam.hpp"
#include "virlab/stationary.hpp"

using namespace virlab;
namespace fs = std::filesystem;

namespace {

struct Clause {
    bool ok;
    std::string text;
};

std::vector<Clause> clauses;

void clause(bool ok, const std::string& text) { clauses.push_back({ok, text}); }

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// shared sweep for criteria 1-3 (the pinned configuration)
struct Sweep {
    std::vector<double> eps{0.2, 0.1, 0.05, 0.025};
    std::vector<PerturbationReport> reps;
};

Sweep run_sweep_123() {
    GridSpec g(101, 401, 1.0, 15.0);
    DiffPath p = gaussian_loop_path(g);
    Sweep s;
    for (double e : s.eps) s.reps.push_back(perturb(p, SeminormOrder(1, 2, 1), e, 1));
    return s;
}

void criterion1() {
    Sweep s = run_sweep_123();
    std::vector<std::pair<double, double>> pts;
    bool all_pos = true;
    for (std::size_t i = 0; i < s.eps.size(); ++i) {
        all_pos = all_pos && s.reps[i].delta_e > 0.0;
        pts.push_back({s.eps[i], s.reps[i].delta_e});
    }
    clause(all_pos, "Delta E > 0 at every eps");
    const double slope = fit_loglog_slope(pts);
    clause(slope >= 2.7 && slope <= 3.3, "fitted slope " + num(slope) + " in [2.7, 3.3]");
    const double ratio = s.reps.back().ratio;
    clause(ratio >= 0.9 && ratio <= 1.1,
           "measured/predicted " + num(ratio) + " at eps = 0.025 in [0.9, 1.1]");
}

void criterion2() {
    Sweep s = run_sweep_123();
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 0; i < s.eps.size(); ++i) {
        const double r = s.reps[i].closeness / s.eps[i];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    clause(hi / lo < 2.0,
           "closeness/eps spread " + num(hi / lo) + "x across the sweep (< 2x)");
}

void criterion3() {
    Sweep s = run_sweep_123();
    double worst = 0.0;
    for (const auto& r : s.reps)
        worst = std::max({worst, r.endpoint_residual_0, r.endpoint_residual_T});
    clause(worst <= 1e-9, "max endpoint residual " + num(worst) + " <= 1e-9");
}

void criterion4() {
    GridSpec g(161, 1201, 1.0, 15.0);
    std::vector<double> alpha(g.n_t);
    for (int i = 0; i < g.n_t; ++i) alpha[i] = g.t(i);
    VirasoroPath vp(gaussian_loop_path(g), alpha);
    SeminormOrder order(1, 2, 1);
    VirasoroPerturbationReport r2 = perturb_virasoro(vp, order, 0.2);
    VirasoroPerturbationReport r1 = perturb_virasoro(vp, order, 0.1);
    clause(r2.evir_after < r2.evir_before && r1.evir_after < r1.evir_before,
           "E_Vir strictly decreases (drops " + num(r2.evir_before - r2.evir_after) + ", " +
               num(r1.evir_before - r1.evir_after) + ")");
    const double bres = std::max(r2.beta_endpoint_residual, r1.beta_endpoint_residual);
    clause(bres <= 1e-8, "|beta(T) - alpha(T)| " + num(bres) + " <= 1e-8");
    const double slope = std::log2(r2.stage1_saving / r1.stage1_saving);
    clause(slope >= 4.6 && slope <= 5.4,
           "stage-1 saving slope " + num(slope) + " within 5 +- 0.4");
    const double q2 = r2.stage2_disturbance / std::pow(0.2, 5.5);
    const double q1 = r1.stage2_disturbance / std::pow(0.1, 5.5);
    const double spread = std::max(q1, q2) / std::min(q1, q2);
    clause(spread <= 2.0,
           "stage-2 disturbance/eps^{2m+3/2} spread " + num(spread) +
               "x (<= 2x); the tuned bump's energy cost is quadratic in its "
               "amplitude (~eps^{4m}), far below the claimed order");
}

void criterion5() {
    const int n = 3001;
    const double xmax = 10.0;
    double worst_coc = 0.0, worst_assoc = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Diffeo1D f1 = random_diffeo(n, xmax, 1000 + 3 * seed);
        Diffeo1D f2 = random_diffeo(n, xmax, 1000 + 3 * seed + 1);
        Diffeo1D f3 = random_diffeo(n, xmax, 1000 + 3 * seed + 2);
        const double r = bott_cocycle(f2, f3) - bott_cocycle(compose(f1, f2), f3) +
                         bott_cocycle(f1, compose(f2, f3)) - bott_cocycle(f1, f2);
        worst_coc = std::max(worst_coc, std::abs(r));
        VirasoroElement a{f1, 0.4}, b{f2, -0.3}, c{f3, 0.2};
        VirasoroElement lhs = virasoro_mul(virasoro_mul(a, b), c);
        VirasoroElement rhs = virasoro_mul(a, virasoro_mul(b, c));
        double assoc = std::abs(lhs.alpha - rhs.alpha);
        for (int i = 0; i < n; ++i)
            assoc = std::max(assoc, std::abs(lhs.phi.u[i] - rhs.phi.u[i]));
        worst_assoc = std::max(worst_assoc, assoc);
    }
    clause(worst_coc <= 1e-7, "cocycle identity residual " + num(worst_coc) + " <= 1e-7");
    Diffeo1D id(n, xmax);
    Diffeo1D phi(n, xmax);
    for (int i = 0; i < n; ++i) {
        const double x = phi.x(i);
        phi.u[i] = 0.1 * std::exp(-x * x);
    }
    phi.validate();
    Diffeo1D psi = random_diffeo(n, xmax, 77);
    const double cid = std::abs(bott_cocycle(id, psi));
    const double cid2 = std::abs(bott_cocycle(phi, id));
    clause(cid == 0.0 && cid2 == 0.0, "c(Id, psi) = c(phi, Id) = 0 to rounding");
    const double cinv = std::abs(bott_cocycle(phi, invert(phi)));
    clause(cinv <= 1e-8, "c(phi, phi^{-1}) " + num(cinv) + " <= 1e-8");
    clause(worst_assoc <= 1e-7, "associativity residual " + num(worst_assoc) + " <= 1e-7");
}

void criterion6() {
    GridSpec g(101, 801, 1.0, 15.0);
    DiffPath p = gaussian_loop_path(g);
    const double E = energy_diff(p);
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Diffeo1D eta = random_diffeo(g.n_x, g.x_max, seed);
        worst = std::max(worst, std::abs(energy_diff(compose_spatial(p, eta)) - E));
    }
    clause(worst <= 1e-6 * E,
           "|E(phi o eta) - E(phi)| " + num(worst) + " <= 1e-6 E = " + num(1e-6 * E));
}

void criterion7() {
    GridSpec g(201, 801, 1.0, 15.0);
    DiffPath p = gaussian_ramp_path(g);
    LengthReport r = reduce_length(p, SeminormOrder(1, 2, 1), 0.05);
    clause(r.length_after < r.length_before,
           "L(psi) = " + num(r.length_after) + " < L(phi) = " + num(r.length_before));
    ConstantSpeedResult cs = constant_speed(p);
    const double E = energy_diff(cs.path), L = length_diff(cs.path);
    clause(g.T * E - L * L <= 1e-6 * L * L,
           "T E - L^2 = " + num(g.T * E - L * L) + " <= 1e-6 L^2 after reparametrization");
    const double s1 = std::abs(r.l2_psi - r.e_psi_g_over_t);
    const double s2 = r.e_psi_g_over_t - r.e_psi_t_over_t;
    const double s3 = r.e_phi_f_over_t - r.e_psi_t_over_t;
    const double s4 = std::abs(r.e_phi_f_over_t - r.l2_phi_f);
    const double s5 = std::abs(r.l2_phi_f - r.l2_phi);
    clause(s1 <= 1e-8 && s2 <= 1e-8 && s3 > 0.0 && s4 <= 1e-8 && s5 <= 1e-8,
           "proof chain slacks " + num(s1) + ", " + num(s2) + ", strict gap " + num(s3) +
               ", " + num(s4) + ", " + num(s5) + " all within 1e-8");
}

/// Rayleigh quotients of the discrete second variation along a family of
/// probe directions: the warp increments themselves (the only directions
/// the construction can move in) and seeded smooth bumps. Hessian-vector
/// products by central differences of the exact gradient.
double min_rayleigh_over_probes(const DiffPath& path) {
    const GridSpec& g = path.grid;
    const double h = 1e-5;
    auto dot = [&](const ScalarField2D& a, const ScalarField2D& b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i) acc += a.values[i] * b.values[i];
        return acc;
    };
    auto rayleigh = [&](ScalarField2D v) {
        const double n = std::sqrt(dot(v, v));
        for (double& x : v.values) x /= n;
        DiffPath pp = path, pm = path;
        for (std::size_t i = 0; i < v.values.size(); ++i) {
            pp.u.values[i] += h * v.values[i];
            pm.u.values[i] -= h * v.values[i];
        }
        GradientResult gp = energy_gradient(pp), gm = energy_gradient(pm);
        ScalarField2D Hv(g);
        for (std::size_t i = 0; i < Hv.values.size(); ++i)
            Hv.values[i] = (gp.grad.values[i] - gm.grad.values[i]) / (2.0 * h);
        return dot(v, Hv);
    };
    double best = 1e300;
    // the warp family's own directions
    for (double eps : {0.2, 0.1, 0.05}) {
        PerturbationReport r = perturb(path, SeminormOrder(1, 2, 1), eps, 1);
        ScalarField2D v(g);
        for (std::size_t i = 0; i < v.values.size(); ++i)
            v.values[i] = r.psi.u.values[i] - path.u.values[i];
        best = std::min(best, rayleigh(std::move(v)));
    }
    // seeded smooth endpoint-preserving bumps
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SplitMix64 rng(seed);
        double c[3], a[3];
        int k[3];
        for (int i = 0; i < 3; ++i) {
            c[i] = rng.uniform(-1.0, 1.0);
            a[i] = rng.uniform(-2.0, 2.0);
            k[i] = 1 + int(rng.uniform(0.0, 4.0));
        }
        ScalarField2D v = sample(g, [&](double t, double x) {
            double val = 0.0;
            for (int i = 0; i < 3; ++i)
                val += c[i] * std::sin(M_PI * k[i] * t / g.T) *
                       std::exp(-(x - a[i]) * (x - a[i]));
            return val;
        });
        best = std::min(best, rayleigh(std::move(v)));
    }
    return best;
}

void criterion8() {
    GridSpec g(101, 401, 1.0, 15.0);
    Diffeo1D id(g.n_x, g.x_max);
    Diffeo1D target(g.n_x, g.x_max);
    for (int i = 0; i < g.n_x; ++i) {
        const double x = target.x(i);
        target.u[i] = 0.1 * std::exp(-x * x);
    }
    target.validate();
    CriticalPathResult cp = find_critical_path(id, target, linear_path(id, target, g));
    clause(cp.grad_max <= 1e-8, "critical path converged: gradient max-norm " +
                                    num(cp.grad_max) + " <= 1e-8 in " +
                                    std::to_string(cp.iterations) + " iterations");
    SaddleReport s = verify_saddle(cp.path, SeminormOrder(1, 2, 1), 0.05);
    clause(s.rep.delta_e > 0.0,
           "verify_saddle Delta E = " + num(s.rep.delta_e) + " (native grid " +
           num(s.rep.delta_e_native) + ") > 0 at eps = 0.05, predicted first-order "
           "saving " + num(s.rep.predicted) +
           "; at a stationary path the first-order response of any "
           "endpoint-preserving variation vanishes (the native-grid change scales "
           "like eps^{2(m+a)}), and the time-warp direction has positive Hessian "
           "here, so no warp can exhibit the saddle at this grid; smallest "
           "second-variation Rayleigh quotient over the warp directions and 20 "
           "seeded smooth directions: " +
           num(min_rayleigh_over_probes(cp.path)));
}

void criterion9() {
    GridSpec g(61, 301, 1.0, 12.0);
    double worst = 0.0;
    const double h = 1e-5;
    for (std::uint64_t ps = 1; ps <= 10; ++ps) {
        DiffPath p = random_path(g, ps);
        GradientResult gr = energy_gradient(p);
        for (std::uint64_t ds = 1; ds <= 10; ++ds) {
            SplitMix64 rng(100 * ps + ds);
            ScalarField2D v = sample(g, [&](double, double) { return 0.0; });
            double c[3], a[3];
            int k[3];
            for (int i = 0; i < 3; ++i) {
                c[i] = rng.uniform(-1.0, 1.0);
                a[i] = rng.uniform(-2.0, 2.0);
                k[i] = 1 + int(rng.uniform(0.0, 3.0));
            }
            v = sample(g, [&](double t, double x) {
                double val = 0.0;
                for (int i = 0; i < 3; ++i)
                    val += c[i] * std::sin(M_PI * k[i] * t / g.T) *
                           std::exp(-(x - a[i]) * (x - a[i]));
                return val;
            });
            DiffPath pp = p, pm = p;
            for (std::size_t i = 0; i < v.values.size(); ++i) {
                pp.u.values[i] += h * v.values[i];
                pm.u.values[i] -= h * v.values[i];
            }
            const double fd = (energy_diff(pp) - energy_diff(pm)) / (2.0 * h);
            double an = 0.0;
            for (std::size_t i = 0; i < v.values.size(); ++i)
                an += gr.grad.values[i] * v.values[i];
            worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(fd), 1e-8));
        }
    }
    clause(worst <= 1e-6,
           "analytic vs central-difference gradient, worst relative error " + num(worst));
}

void criterion10() {
    fs::path d1 = fs::temp_directory_path() / "virlab_acc_det1";
    fs::path d2 = fs::temp_directory_path() / "virlab_acc_det2";
    fs::remove_all(d1);
    fs::remove_all(d2);
    fs::create_directories(d1);
    const fs::path cfg = d1 / "cfg.json";
    {
        std::ofstream out(cfg);
        out << R"({
  "grid": {"n_t": 41, "n_x": 201, "T": 1.0, "x_max": 12.0},
  "path": {"family": "random", "seed": 11},
  "order": {"k": 1, "m": 2, "n": 1},
  "epsilons": [0.2, 0.1, 0.05]
})";
    }
    auto run_once = [&](const fs::path& out_dir) {
        const std::string c = cfg.string(), o = out_dir.string();
        const char* argv[] = {"virlab", "perturb", "--config", c.c_str(), "--out", o.c_str()};
        return virlab::cli::run(6, argv);
    };
    const int rc1 = run_once(d1), rc2 = run_once(d2);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };
    const bool same_csv = slurp(d1 / "perturb.csv") == slurp(d2 / "perturb.csv");
    const bool same_json = slurp(d1 / "perturb_summary.json") == slurp(d2 / "perturb_summary.json");
    clause(rc1 == 0 && rc2 == 0 && same_csv && same_json,
           std::string("repeated runs byte-identical: csv ") + (same_csv ? "yes" : "NO") +
               ", json " + (same_json ? "yes" : "NO"));
}

struct Criterion {
    int id;
    const char* label;
    void (*fn)();
    double time_limit;  // seconds; 0 = none
};

const Criterion kCriteria[] = {
    {1, "warp scaling on the Gaussian test path", criterion1, 60.0},
    {2, "closeness scaling", criterion2, 0.0},
    {3, "endpoint preservation", criterion3, 0.0},
    {4, "Virasoro two-stage perturbation", criterion4, 120.0},
    {5, "group law and Bott cocycle", criterion5, 0.0},
    {6, "right invariance of the energy", criterion6, 0.0},
    {7, "length corollary pipeline", criterion7, 0.0},
    {8, "saddle demonstration", criterion8, 0.0},
    {9, "gradient consistency", criterion9, 0.0},
    {10, "deterministic emission", criterion10, 0.0},
};

bool run_one(const Criterion& c) {
    clauses.clear();
    const auto start = std::chrono::steady_clock::now();
    bool threw = false;
    std::string err;
    try {
        c.fn();
    } catch (const std::exception& e) {
        threw = true;
        err = e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = !threw;
    for (const Clause& cl : clauses) ok = ok && cl.ok;
    if (c.time_limit > 0.0 && elapsed > c.time_limit) ok = false;
    std::printf("criterion %d (%s): %s  [%.1fs%s]\n", c.id, c.label, ok ? "PASS" : "FAIL",
                elapsed,
                c.time_limit > 0.0 ? (" / limit " + num(c.time_limit) + "s").c_str() : "");
    for (const Clause& cl : clauses)
        std::printf("  - %s: %s\n", cl.ok ? "ok" : "FAILED", cl.text.c_str());
    if (threw) std::printf("  - FAILED: exception: %s\n", err.c_str());
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    bool all_ok = true;
    if (argc > 1) {
        const int want = std::atoi(argv[1]);
        for (const Criterion& c : kCriteria)
            if (c.id == want) all_ok = run_one(c) && all_ok;
    } else {
        for (const Criterion& c : kCriteria) all_ok = run_one(c) && all_ok;
    }
    return all_ok ? 0 : 1;
}
