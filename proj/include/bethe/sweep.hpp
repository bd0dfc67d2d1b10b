#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bethe/convexity.hpp"
#include "bethe/metrics.hpp"
#include "bethe/model.hpp"
#include "bethe/optimizer.hpp"

namespace bethe {

enum class Stage { convex_certified = 0, unique_minimum_observed = 1, multiple_minima = 2 };

const char* stage_name(Stage stage);

// Certificates first (at the model's beta); otherwise the observed restart
// clustering decides. Observed uniqueness is a substitute for an analytic
// uniqueness criterion and is labeled as observed in all outputs.
Stage stage_classification(const Model& model, int restarts, std::uint64_t seed,
                           const OptimizerConfig& config);

struct SweepConfig {
    GraphFamily family;
    int model_count = 20;
    std::vector<double> beta_grid;  // strictly increasing, all > 0
    int restarts = 20;
    OptimizerConfig optimizer;
    std::uint64_t seed = 0;
    std::string output_path = "sweep";
    bool exact_errors = true;       // compare against the brute-force oracle
    int exact_max_nodes = 25;

    void validate() const;
};

// One (model, beta) cell of a sweep.
struct CellResult {
    int model_id = 0;
    double beta = 0.0;

    bool exact_available = false;
    ErrorRecord best;      // errors of the lowest-F_B converged run
    ErrorRecord restart_avg; // averaged over converged runs
    int excluded_runs = 0; // non-converged runs excluded from the average

    int distinct_minima = 0;
    int converged_runs = 0;
    int total_runs = 0;
    double best_f = 0.0;
    double best_grad_norm = 0.0;

    bool diag_convex = false;
    bool sum_convex = false;
    double beta_star_diag = 0.0;
    double beta_star_sum = 0.0;
    Stage stage = Stage::multiple_minima;
};

// Per-beta aggregates over the model ensemble.
struct AggregateRow {
    double beta = 0.0;
    int models_with_exact = 0;

    double singleton_mean = 0.0, singleton_std = 0.0;
    double pairwise_mean = 0.0, pairwise_std = 0.0;
    double partition_mean = 0.0, partition_std = 0.0;
    double singleton_avg_mean = 0.0, pairwise_avg_mean = 0.0, partition_avg_mean = 0.0;

    double frac_diag_convex = 0.0;
    double frac_sum_convex = 0.0;
    double frac_certified = 0.0; // either certificate
    double convergence_rate = 0.0;
    double mean_distinct_minima = 0.0;
    double beta_star_diag_mean = 0.0;
    double beta_star_diag_std = 0.0;
};

struct SweepResult {
    SweepConfig config;
    std::vector<CellResult> cells;      // model-major, beta-minor order
    std::vector<AggregateRow> aggregates;
    long total_runs = 0;
    long converged_runs = 0;
};

// Full protocol for one ensemble: per model and per beta, solve exactly (when
// within the oracle guard), minimize with restarts, compute errors, certify.
// Cells are independent and run in parallel; rows are stored in deterministic
// (model, beta) order, so a fixed seed reproduces the output byte for byte.
SweepResult run_sweep(const SweepConfig& config);

// Writes <output_path>_long.csv (model_id, beta, metric, value),
// <output_path>_aggregate.csv and, unless csv_only, the JSON twin
// <output_path>.json carrying identical values.
struct EmitPaths {
    std::string long_csv;
    std::string aggregate_csv;
    std::string json;
};

EmitPaths emit_tables(const SweepResult& result, bool csv_only = false);

std::string long_csv_text(const SweepResult& result);
std::string aggregate_csv_text(const SweepResult& result);
std::string sweep_json_text(const SweepResult& result);

SweepConfig sweep_config_from_json(const std::string& text);
std::string sweep_config_to_json(const SweepConfig& config);

// Accepts either a bare OptimizerConfig object or any object with an
// "optimizer" member (e.g. a sweep configuration).
OptimizerConfig optimizer_config_from_json(const std::string& text);

// Desk-scale presets mirroring the experiment families: ferromagnetic
// couplings U(0,1) or spin-glass couplings U(-1,1), fields U(-1/8, 1/8),
// beta grid {1e-3, 0.1, 0.2, ..., 2.0}. The 8x8 grid preset is Bethe-only
// (its exact solution is out of enumeration range).
SweepConfig sweep_preset(const std::string& name, bool spin_glass, std::uint64_t seed);
std::vector<std::string> sweep_preset_names();

} // namespace bethe
