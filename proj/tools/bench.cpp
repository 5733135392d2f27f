// Benchmark: OpenMP kernels against the serial reference implementation.
// Usage: bench [--quick]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "virlab/diffpath.hpp"
#include "virlab/grid_field.hpp"
#include "virlab/perturb_diff.hpp"

using namespace virlab;

namespace {

double now() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <class Fn>
double time_best(Fn&& fn, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now();
        fn();
        best = std::min(best, now() - t0);
    }
    return best;
}

volatile double sink;

void row(const char* name, double serial, double parallel) {
    std::printf("%-26s %10.4f ms %10.4f ms   %5.2fx\n", name, serial * 1e3, parallel * 1e3,
                serial / parallel);
}

} // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
    const int reps = quick ? 2 : 5;
    std::vector<std::pair<int, int>> sizes =
        quick ? std::vector<std::pair<int, int>>{{101, 801}}
              : std::vector<std::pair<int, int>>{{201, 2001}, {401, 8001}};
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run the same serial code\n");
#endif
    for (auto [nt, nx] : sizes) {
        GridSpec g(nt, nx, 1.0, 15.0);
        ScalarField2D f = sample(g, [](double t, double x) {
            return (1.0 + 0.3 * std::cos(2.0 * t)) * std::exp(-x * x) +
                   0.2 * std::exp(-(x - 2.0) * (x - 2.0));
        });
        sink = derivative_time(f, 1).values[0];  // wake the thread pool
        std::printf("\ngrid %d x %d\n", nt, nx);
        std::printf("%-26s %13s %13s %8s\n", "kernel", "serial", "openmp", "speedup");
        row("derivative_time(2)",
            time_best([&] { sink = serial::derivative_time(f, 2).values[0]; }, reps),
            time_best([&] { sink = derivative_time(f, 2).values[0]; }, reps));
        row("derivative_space(2)",
            time_best([&] { sink = serial::derivative_space(f, 2).values[0]; }, reps),
            time_best([&] { sink = derivative_space(f, 2).values[0]; }, reps));
        row("integrate_space_time",
            time_best([&] { sink = serial::integrate_space_time(f); }, reps),
            time_best([&] { sink = integrate_space_time(f); }, reps));
        row("weighted_abs_max(k=1)",
            time_best([&] { sink = serial::weighted_abs_max(f, 1); }, reps),
            time_best([&] { sink = weighted_abs_max(f, 1); }, reps));

        // an end-to-end hot path: the full perturbation pipeline (site
        // selection, gauge, warp solve, resampling, refined seminorms)
        DiffPath p = gaussian_loop_path(g);
        const double t0 = now();
        PerturbationReport rep = perturb(p, SeminormOrder(1, 2, 1), 0.1, 1);
        std::printf("%-26s %24.1f ms   (delta_e %.3e)\n", "perturb(eps=0.1)",
                    (now() - t0) * 1e3, rep.delta_e);
    }
    return 0;
}
