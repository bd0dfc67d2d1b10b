// Benchmark: serial reference vs the blocked Gray-code OpenMP kernel for the
// brute-force oracle, plus thread scaling of the kernel.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"

#include "bethe/exact.hpp"
#include "bethe/model.hpp"

using namespace bethe;
using Clock = std::chrono::steady_clock;

namespace {

double time_once(const Model& model, bool reference, const ExactOptions& options,
                 double* log_z) {
    const auto t0 = Clock::now();
    const ExactSolution sol =
        reference ? brute_force_solve_reference(model, options) : brute_force_solve(model, options);
    const auto t1 = Clock::now();
    *log_z = sol.log_z;
    return std::chrono::duration<double>(t1 - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"brute-force oracle benchmark: serial reference vs OpenMP kernel"};
    int rows = 4, cols = 4;
    int er_nodes = 0;
    double er_p = 0.2;
    double beta = 1.0;
    std::uint64_t seed = 1;
    int reps = 3;
    int reference_limit = 22;
    app.add_option("--rows", rows, "grid rows");
    app.add_option("--cols", cols, "grid cols");
    app.add_option("--er", er_nodes, "use an Erdos-Renyi graph with this many nodes instead");
    app.add_option("--p", er_p, "Erdos-Renyi edge probability");
    app.add_option("--beta", beta, "inverse temperature");
    app.add_option("--seed", seed, "family seed");
    app.add_option("--reps", reps, "repetitions per measurement");
    app.add_option("--reference-limit", reference_limit,
                   "skip the serial reference above this node count");
    CLI11_PARSE(app, argc, argv);

    GraphFamily family =
        er_nodes > 0 ? erdos_renyi_family(er_nodes, er_p, seed) : grid_family(rows, cols, seed);
    family.coupling_range = {-1.0, 1.0};
    const Model model = build_model(family, beta);
    ExactOptions options;
    options.max_nodes = 30;

    std::printf("model: %s  nodes=%d edges=%d beta=%.3f\n", family.describe().c_str(),
                model.node_count, model.edge_count(), beta);

    double ref_time = 0.0, ref_log_z = 0.0;
    const bool run_reference = model.node_count <= reference_limit;
    if (run_reference) {
        for (int r = 0; r < reps; ++r) {
            double log_z;
            const double t = time_once(model, true, options, &log_z);
            ref_time = r == 0 ? t : std::min(ref_time, t);
            ref_log_z = log_z;
        }
        std::printf("serial reference: %8.3f s   logZ=%.12f\n", ref_time, ref_log_z);
    } else {
        std::printf("serial reference: skipped (N > %d)\n", reference_limit);
    }

#ifdef _OPENMP
    const int max_threads = omp_get_max_threads();
#else
    const int max_threads = 1;
#endif
    for (int threads = 1; threads <= max_threads; threads *= 2) {
#ifdef _OPENMP
        omp_set_num_threads(threads);
#endif
        double best = 0.0, log_z = 0.0;
        for (int r = 0; r < reps; ++r) {
            const double t = time_once(model, false, options, &log_z);
            best = r == 0 ? t : std::min(best, t);
        }
        std::printf("kernel %2d thread(s): %8.3f s   logZ=%.12f", threads, best, log_z);
        if (run_reference)
            std::printf("   speedup vs reference %6.1fx   |dlogZ|=%.2e", ref_time / best,
                        std::fabs(log_z - ref_log_z));
        std::printf("\n");
    }
    return 0;
}
