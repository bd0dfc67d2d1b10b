#pragma once

#include <array>
#include <string>
#include <vector>

#include "bethe/model.hpp"

namespace bethe {

// Ground truth obtained by summing the Boltzmann distribution over all 2^N
// spin configurations.
struct ExactSolution {
    double log_z = 0.0;
    std::vector<double> singleton;                  // P(X_i = +1)
    std::vector<std::array<double, 4>> pairwise;    // per edge: P(++), P(+-), P(-+), P(--)
};

struct ExactOptions {
    int max_nodes = 25; // resource guard; enumeration is 2^N
};

// OpenMP kernel. The configuration space is cut into 256 fixed chunks; each
// chunk walks its range in Gray-code order with incremental energy updates
// and log-sum-exp rescaling, and chunks merge in index order, so the result
// does not depend on the number of threads.
ExactSolution brute_force_solve(const Model& model, const ExactOptions& options = {});

// Serial reference: recomputes every configuration energy from scratch.
// Slow but independent of the kernel above; kept for testing and benchmarks.
ExactSolution brute_force_solve_reference(const Model& model, const ExactOptions& options = {});

// -(1/beta) log Z, the value the Bethe minimum tries to approximate.
double gibbs_free_energy_at_minimum(const Model& model, const ExactOptions& options = {});

std::string exact_to_json(const ExactSolution& solution, const Model& model);

} // namespace bethe
