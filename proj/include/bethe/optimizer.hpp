#pragma once

#include <cstdint>
#include <vector>

#include "bethe/model.hpp"
#include "bethe/rng.hpp"

namespace bethe {

struct OptimizerConfig {
    double epsilon = 1e-6;            // gradient-norm convergence tolerance
    double tau1 = 1e-4;               // Wolfe sufficient-decrease parameter
    double tau2 = 0.9;                // Wolfe curvature parameter
    double projection_shrink = 0.9;   // step shrink factor while infeasible
    double expansion = 1.1;           // line-search step growth factor
    int max_iterations = 10000;
    int max_line_search_steps = 60;
    bool random_spd_init = false;     // random SPD B^(0) instead of identity
    double cluster_tol = 1e-2;        // L-inf radius for distinct-minima clustering
    bool record_trace = false;

    void validate() const; // throws std::invalid_argument
};

struct TracePoint {
    int iteration;
    double f;
    double grad_norm;
    double step;
};

struct MinimizationResult {
    std::vector<double> q_star;
    double f_value = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    int bfgs_skips = 0;           // curvature-guard skips of the B update
    int line_search_failures = 0; // gradient-fallback steps
    std::vector<TracePoint> trace;
};

enum class WolfeStatus { both, sufficient_decrease_only, failed };

struct WolfeResult {
    double rho = 0.0;
    WolfeStatus status = WolfeStatus::failed;
    int evaluations = 0;
    // Objective and gradient at q_tail + rho d when the final probe landed on
    // the returned step (empty otherwise); lets callers reuse them.
    double f_at_rho = 0.0;
    std::vector<double> grad_at_rho;
};

// Adaptive line search on the segment q_tail -> q_head, d = q_head - q_tail:
//   W1: F(q + rho d) <= F(q) + tau1 rho d.grad(q)
//   W2: d.grad(q + rho d) >= tau2 d.grad(q)
// Starts from a random rho in (0,1), expands by config.expansion while W1
// holds and W2 fails (capped at rho = 1, the feasible end of the segment),
// then contracts by randomized bisection. Throws std::invalid_argument if d
// is not a descent direction.
WolfeResult wolfe_line_search(const Model& model, const std::vector<double>& q_tail,
                              const std::vector<double>& q_head, const OptimizerConfig& config,
                              SplitMix64& rng);

// Projected quasi-Newton minimization of F_B over the clamped Bethe box:
// direction d = -B^T grad with BFGS inverse-Hessian updates, maximal feasible
// step found by repeated shrinking, step size by Wolfe line search. rho_max
// resets to 1 at every outer iteration. Non-positive curvature s.y skips the
// B update; a failed line search falls back to a shrinking gradient step.
MinimizationResult bethe_min(const Model& model, const std::vector<double>& q0,
                             const OptimizerConfig& config, std::uint64_t seed = 0);

struct MultiRestartResult {
    std::vector<MinimizationResult> runs;
    std::vector<int> cluster_of;                    // per run; -1 if not converged
    std::vector<std::vector<double>> cluster_reps;  // representative q* per cluster
    int distinct_minima = 0;                        // clusters among converged runs
    int best_run = -1;                              // lowest F_B (converged preferred)
    int converged_count = 0;
};

// Independent BETHE-MIN runs from uniform-random interior starts; restart r
// draws its start and line-search randomness from derive_seed(seed, {r}), so
// results do not depend on thread scheduling.
MultiRestartResult multi_restart_minimize(const Model& model, int restarts, std::uint64_t seed,
                                          const OptimizerConfig& config);

void write_trace_csv(const MinimizationResult& result, const std::string& path);

} // namespace bethe
