#include "bethe/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"

#include "bethe/exact.hpp"
#include "bethe/free_energy.hpp"

namespace bethe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct MeanStd {
    double mean = 0.0, std_dev = 0.0;
};

MeanStd mean_std(const std::vector<double>& values) {
    MeanStd out;
    if (values.empty()) return out;
    for (double v : values) out.mean += v;
    out.mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - out.mean) * (v - out.mean);
    out.std_dev = std::sqrt(var / static_cast<double>(values.size()));
    return out;
}

} // namespace

const char* stage_name(Stage stage) {
    switch (stage) {
        case Stage::convex_certified: return "convex-certified";
        case Stage::unique_minimum_observed: return "unique-minimum-observed";
        case Stage::multiple_minima: return "multiple-minima";
    }
    return "?";
}

Stage stage_classification(const Model& model, int restarts, std::uint64_t seed,
                           const OptimizerConfig& config) {
    const ConvexityReport report = certify(model);
    if (report.diag_dominance_convex || report.sum_decomposition_convex)
        return Stage::convex_certified;
    const MultiRestartResult mr = multi_restart_minimize(model, restarts, seed, config);
    return mr.distinct_minima <= 1 ? Stage::unique_minimum_observed : Stage::multiple_minima;
}

void SweepConfig::validate() const {
    if (model_count < 1) throw std::invalid_argument("model_count must be >= 1");
    if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    if (beta_grid.empty()) throw std::invalid_argument("beta_grid must be non-empty");
    double prev = 0.0;
    for (double beta : beta_grid) {
        if (!(beta > prev))
            throw std::invalid_argument("beta_grid must be strictly increasing and positive");
        prev = beta;
    }
    optimizer.validate();
}

SweepResult run_sweep(const SweepConfig& config) {
    config.validate();
    const int n_models = config.model_count;
    const int n_betas = static_cast<int>(config.beta_grid.size());

    SweepResult result;
    result.config = config;
    result.cells.resize(static_cast<std::size_t>(n_models) * n_betas);

    // Topology, potentials and both critical-beta estimates are shared by all
    // beta cells of a model; compute them once.
    std::vector<Model> base_models;
    std::vector<double> beta_star_diag(n_models), beta_star_sum(n_models);
    base_models.reserve(n_models);
    for (int m = 0; m < n_models; ++m) {
        GraphFamily family = config.family;
        family.seed = derive_seed(config.seed, {0xA, static_cast<std::uint64_t>(m)});
        base_models.push_back(build_model(family, config.beta_grid[0]));
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int m = 0; m < n_models; ++m) {
        beta_star_diag[m] = critical_beta_diag_dominance(base_models[m], kDefaultBetaMax);
        double star_sum = kInf;
        for (int e = 0; e < base_models[m].edge_count(); ++e)
            star_sum = std::min(star_sum,
                                edge_beta_star(base_models[m].degree(base_models[m].edges[e].i),
                                               base_models[m].degree(base_models[m].edges[e].j),
                                               base_models[m].couplings[e]));
        beta_star_sum[m] = star_sum;
    }

    const bool exact_allowed =
        config.exact_errors && config.family.node_count() <= config.exact_max_nodes;
    ExactOptions exact_options;
    exact_options.max_nodes = config.exact_max_nodes;

    const int n_cells = n_models * n_betas;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int cell = 0; cell < n_cells; ++cell) {
        const int m = cell / n_betas;
        const int k = cell % n_betas;
        const double beta = config.beta_grid[k];
        const Model model = base_models[m].with_beta(beta);

        CellResult row;
        row.model_id = m;
        row.beta = beta;
        row.beta_star_diag = beta_star_diag[m];
        row.beta_star_sum = beta_star_sum[m];
        // Both certificate predicates are monotone in beta for a fixed model,
        // so the per-cell verdict is a threshold comparison.
        row.diag_convex = beta < beta_star_diag[m];
        row.sum_convex = beta < beta_star_sum[m];

        const std::uint64_t cell_seed = derive_seed(
            config.seed, {0xB, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(k)});
        const MultiRestartResult mr =
            multi_restart_minimize(model, config.restarts, cell_seed, config.optimizer);

        row.total_runs = config.restarts;
        row.converged_runs = mr.converged_count;
        row.excluded_runs = config.restarts - mr.converged_count;
        row.distinct_minima = mr.distinct_minima;
        const MinimizationResult& best = mr.runs[mr.best_run];
        row.best_f = best.f_value;
        row.best_grad_norm = best.grad_norm;

        if (row.diag_convex || row.sum_convex)
            row.stage = Stage::convex_certified;
        else
            row.stage = mr.distinct_minima <= 1 ? Stage::unique_minimum_observed
                                                : Stage::multiple_minima;

        if (exact_allowed) {
            const ExactSolution exact = brute_force_solve(model, exact_options);
            row.exact_available = true;
            row.best = error_record(exact, model, best.q_star, best.f_value);
            ErrorRecord sum;
            int counted = 0;
            for (const MinimizationResult& run : mr.runs) {
                if (!run.converged) continue;
                const ErrorRecord r = error_record(exact, model, run.q_star, run.f_value);
                sum.partition_error += r.partition_error;
                sum.singleton_error += r.singleton_error;
                sum.pairwise_error += r.pairwise_error;
                ++counted;
            }
            if (counted > 0) {
                row.restart_avg.partition_error = sum.partition_error / counted;
                row.restart_avg.singleton_error = sum.singleton_error / counted;
                row.restart_avg.pairwise_error = sum.pairwise_error / counted;
            }
        }
        result.cells[cell] = std::move(row);
    }

    // Aggregates in fixed beta order.
    result.aggregates.resize(n_betas);
    for (int k = 0; k < n_betas; ++k) {
        AggregateRow agg;
        agg.beta = config.beta_grid[k];
        std::vector<double> singles, pairs, partitions, singles_avg, pairs_avg, partitions_avg;
        std::vector<double> stars;
        int certified_diag = 0, certified_sum = 0, certified_any = 0;
        long converged = 0, total = 0;
        double minima = 0.0;
        for (int m = 0; m < n_models; ++m) {
            const CellResult& row = result.cells[static_cast<std::size_t>(m) * n_betas + k];
            if (row.exact_available) {
                singles.push_back(row.best.singleton_error);
                pairs.push_back(row.best.pairwise_error);
                partitions.push_back(row.best.partition_error);
                singles_avg.push_back(row.restart_avg.singleton_error);
                pairs_avg.push_back(row.restart_avg.pairwise_error);
                partitions_avg.push_back(row.restart_avg.partition_error);
            }
            if (std::isfinite(row.beta_star_diag)) stars.push_back(row.beta_star_diag);
            certified_diag += row.diag_convex;
            certified_sum += row.sum_convex;
            certified_any += (row.diag_convex || row.sum_convex);
            converged += row.converged_runs;
            total += row.total_runs;
            minima += row.distinct_minima;
        }
        agg.models_with_exact = static_cast<int>(singles.size());
        const MeanStd s = mean_std(singles), p = mean_std(pairs), z = mean_std(partitions);
        agg.singleton_mean = s.mean;
        agg.singleton_std = s.std_dev;
        agg.pairwise_mean = p.mean;
        agg.pairwise_std = p.std_dev;
        agg.partition_mean = z.mean;
        agg.partition_std = z.std_dev;
        agg.singleton_avg_mean = mean_std(singles_avg).mean;
        agg.pairwise_avg_mean = mean_std(pairs_avg).mean;
        agg.partition_avg_mean = mean_std(partitions_avg).mean;
        agg.frac_diag_convex = static_cast<double>(certified_diag) / n_models;
        agg.frac_sum_convex = static_cast<double>(certified_sum) / n_models;
        agg.frac_certified = static_cast<double>(certified_any) / n_models;
        agg.convergence_rate = total > 0 ? static_cast<double>(converged) / total : 0.0;
        agg.mean_distinct_minima = minima / n_models;
        const MeanStd star = mean_std(stars);
        agg.beta_star_diag_mean = star.mean;
        agg.beta_star_diag_std = star.std_dev;
        result.aggregates[k] = agg;

        result.converged_runs += converged;
        result.total_runs += total;
    }
    return result;
}

std::string long_csv_text(const SweepResult& result) {
    std::string out = "model_id,beta,metric,value\n";
    auto push = [&](int model_id, double beta, const char* metric, double value) {
        out += std::to_string(model_id);
        out += ',';
        out += fmt17(beta);
        out += ',';
        out += metric;
        out += ',';
        out += fmt17(value);
        out += '\n';
    };
    for (const CellResult& row : result.cells) {
        if (row.exact_available) {
            push(row.model_id, row.beta, "partition_error_best", row.best.partition_error);
            push(row.model_id, row.beta, "singleton_error_best", row.best.singleton_error);
            push(row.model_id, row.beta, "pairwise_error_best", row.best.pairwise_error);
            push(row.model_id, row.beta, "partition_error_avg", row.restart_avg.partition_error);
            push(row.model_id, row.beta, "singleton_error_avg", row.restart_avg.singleton_error);
            push(row.model_id, row.beta, "pairwise_error_avg", row.restart_avg.pairwise_error);
        }
        push(row.model_id, row.beta, "distinct_minima", row.distinct_minima);
        push(row.model_id, row.beta, "converged_runs", row.converged_runs);
        push(row.model_id, row.beta, "excluded_runs", row.excluded_runs);
        push(row.model_id, row.beta, "diag_convex", row.diag_convex ? 1.0 : 0.0);
        push(row.model_id, row.beta, "sum_convex", row.sum_convex ? 1.0 : 0.0);
        push(row.model_id, row.beta, "beta_star_diag", row.beta_star_diag);
        push(row.model_id, row.beta, "beta_star_sum", row.beta_star_sum);
        push(row.model_id, row.beta, "stage", static_cast<double>(static_cast<int>(row.stage)));
        push(row.model_id, row.beta, "best_f", row.best_f);
        push(row.model_id, row.beta, "best_grad_norm", row.best_grad_norm);
    }
    return out;
}

std::string aggregate_csv_text(const SweepResult& result) {
    std::string out =
        "beta,models_with_exact,singleton_mean,singleton_std,pairwise_mean,pairwise_std,"
        "partition_mean,partition_std,singleton_avg_mean,pairwise_avg_mean,partition_avg_mean,"
        "frac_diag_convex,frac_sum_convex,frac_certified,convergence_rate,mean_distinct_minima,"
        "beta_star_diag_mean,beta_star_diag_std\n";
    for (const AggregateRow& a : result.aggregates) {
        out += fmt17(a.beta);
        out += ',' + std::to_string(a.models_with_exact);
        for (double v : {a.singleton_mean, a.singleton_std, a.pairwise_mean, a.pairwise_std,
                         a.partition_mean, a.partition_std, a.singleton_avg_mean,
                         a.pairwise_avg_mean, a.partition_avg_mean, a.frac_diag_convex,
                         a.frac_sum_convex, a.frac_certified, a.convergence_rate,
                         a.mean_distinct_minima, a.beta_star_diag_mean, a.beta_star_diag_std}) {
            out += ',';
            out += fmt17(v);
        }
        out += '\n';
    }
    return out;
}

namespace {

nlohmann::json family_to_json(const GraphFamily& family) {
    nlohmann::json j;
    switch (family.kind) {
        case GraphFamily::Kind::grid:
            j["kind"] = "grid";
            j["rows"] = family.rows;
            j["cols"] = family.cols;
            break;
        case GraphFamily::Kind::complete:
            j["kind"] = "complete";
            j["n"] = family.n;
            break;
        case GraphFamily::Kind::erdos_renyi:
            j["kind"] = "erdos_renyi";
            j["n"] = family.n;
            j["p"] = family.p;
            break;
    }
    j["coupling_range"] = {family.coupling_range.first, family.coupling_range.second};
    j["field_range"] = {family.field_range.first, family.field_range.second};
    j["seed"] = family.seed;
    return j;
}

GraphFamily family_from_json(const nlohmann::json& j) {
    GraphFamily family;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "grid") {
        family.kind = GraphFamily::Kind::grid;
        family.rows = j.at("rows").get<int>();
        family.cols = j.at("cols").get<int>();
    } else if (kind == "complete") {
        family.kind = GraphFamily::Kind::complete;
        family.n = j.at("n").get<int>();
    } else if (kind == "erdos_renyi") {
        family.kind = GraphFamily::Kind::erdos_renyi;
        family.n = j.at("n").get<int>();
        family.p = j.at("p").get<double>();
    } else {
        throw std::invalid_argument("unknown family kind: " + kind);
    }
    if (j.contains("coupling_range")) {
        family.coupling_range = {j["coupling_range"][0].get<double>(),
                                 j["coupling_range"][1].get<double>()};
    }
    if (j.contains("field_range")) {
        family.field_range = {j["field_range"][0].get<double>(),
                              j["field_range"][1].get<double>()};
    }
    if (j.contains("seed")) family.seed = j["seed"].get<std::uint64_t>();
    return family;
}

nlohmann::json optimizer_to_json(const OptimizerConfig& config) {
    return {{"epsilon", config.epsilon},
            {"tau1", config.tau1},
            {"tau2", config.tau2},
            {"projection_shrink", config.projection_shrink},
            {"expansion", config.expansion},
            {"max_iterations", config.max_iterations},
            {"max_line_search_steps", config.max_line_search_steps},
            {"random_spd_init", config.random_spd_init},
            {"cluster_tol", config.cluster_tol}};
}

OptimizerConfig optimizer_from_json(const nlohmann::json& j) {
    OptimizerConfig config;
    if (j.contains("epsilon")) config.epsilon = j["epsilon"].get<double>();
    if (j.contains("tau1")) config.tau1 = j["tau1"].get<double>();
    if (j.contains("tau2")) config.tau2 = j["tau2"].get<double>();
    if (j.contains("projection_shrink"))
        config.projection_shrink = j["projection_shrink"].get<double>();
    if (j.contains("expansion")) config.expansion = j["expansion"].get<double>();
    if (j.contains("max_iterations")) config.max_iterations = j["max_iterations"].get<int>();
    if (j.contains("max_line_search_steps"))
        config.max_line_search_steps = j["max_line_search_steps"].get<int>();
    if (j.contains("random_spd_init")) config.random_spd_init = j["random_spd_init"].get<bool>();
    if (j.contains("cluster_tol")) config.cluster_tol = j["cluster_tol"].get<double>();
    config.validate();
    return config;
}

nlohmann::json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

} // namespace

std::string sweep_json_text(const SweepResult& result) {
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(sweep_config_to_json(result.config));
    auto cells = nlohmann::json::array();
    for (const CellResult& row : result.cells) {
        nlohmann::json c{{"model_id", row.model_id},
                         {"beta", row.beta},
                         {"distinct_minima", row.distinct_minima},
                         {"converged_runs", row.converged_runs},
                         {"excluded_runs", row.excluded_runs},
                         {"diag_convex", row.diag_convex},
                         {"sum_convex", row.sum_convex},
                         {"beta_star_diag", finite_or_null(row.beta_star_diag)},
                         {"beta_star_sum", finite_or_null(row.beta_star_sum)},
                         {"stage", stage_name(row.stage)},
                         {"best_f", row.best_f},
                         {"best_grad_norm", row.best_grad_norm}};
        if (row.exact_available) {
            c["partition_error_best"] = row.best.partition_error;
            c["singleton_error_best"] = row.best.singleton_error;
            c["pairwise_error_best"] = row.best.pairwise_error;
            c["partition_error_avg"] = row.restart_avg.partition_error;
            c["singleton_error_avg"] = row.restart_avg.singleton_error;
            c["pairwise_error_avg"] = row.restart_avg.pairwise_error;
        }
        cells.push_back(std::move(c));
    }
    j["cells"] = std::move(cells);
    auto aggregates = nlohmann::json::array();
    for (const AggregateRow& a : result.aggregates) {
        aggregates.push_back({{"beta", a.beta},
                              {"models_with_exact", a.models_with_exact},
                              {"singleton_mean", a.singleton_mean},
                              {"singleton_std", a.singleton_std},
                              {"pairwise_mean", a.pairwise_mean},
                              {"pairwise_std", a.pairwise_std},
                              {"partition_mean", a.partition_mean},
                              {"partition_std", a.partition_std},
                              {"singleton_avg_mean", a.singleton_avg_mean},
                              {"pairwise_avg_mean", a.pairwise_avg_mean},
                              {"partition_avg_mean", a.partition_avg_mean},
                              {"frac_diag_convex", a.frac_diag_convex},
                              {"frac_sum_convex", a.frac_sum_convex},
                              {"frac_certified", a.frac_certified},
                              {"convergence_rate", a.convergence_rate},
                              {"mean_distinct_minima", a.mean_distinct_minima},
                              {"beta_star_diag_mean", a.beta_star_diag_mean},
                              {"beta_star_diag_std", a.beta_star_diag_std}});
    }
    j["aggregates"] = std::move(aggregates);
    return j.dump(2);
}

EmitPaths emit_tables(const SweepResult& result, bool csv_only) {
    EmitPaths paths;
    paths.long_csv = result.config.output_path + "_long.csv";
    paths.aggregate_csv = result.config.output_path + "_aggregate.csv";
    paths.json = result.config.output_path + ".json";

    auto write_file = [](const std::string& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + path);
        out << text;
        if (!out) throw std::runtime_error("write failed: " + path);
    };
    write_file(paths.long_csv, long_csv_text(result));
    write_file(paths.aggregate_csv, aggregate_csv_text(result));
    if (!csv_only)
        write_file(paths.json, sweep_json_text(result));
    else
        paths.json.clear();
    return paths;
}

std::string sweep_config_to_json(const SweepConfig& config) {
    nlohmann::json j;
    j["family"] = family_to_json(config.family);
    j["model_count"] = config.model_count;
    j["beta_grid"] = config.beta_grid;
    j["restarts"] = config.restarts;
    j["optimizer"] = optimizer_to_json(config.optimizer);
    j["seed"] = config.seed;
    j["output_path"] = config.output_path;
    j["exact_errors"] = config.exact_errors;
    j["exact_max_nodes"] = config.exact_max_nodes;
    return j.dump(2);
}

SweepConfig sweep_config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed sweep config: ") + e.what());
    }
    try {
        SweepConfig config;
        config.family = family_from_json(j.at("family"));
        if (j.contains("model_count")) config.model_count = j["model_count"].get<int>();
        if (j.contains("beta_grid")) {
            if (j["beta_grid"].is_array()) {
                config.beta_grid = j["beta_grid"].get<std::vector<double>>();
            } else {
                const double start = j["beta_grid"].at("start").get<double>();
                const double stop = j["beta_grid"].at("stop").get<double>();
                const double step = j["beta_grid"].at("step").get<double>();
                if (!(step > 0.0)) throw std::invalid_argument("beta grid step must be positive");
                for (double b = start; b <= stop + 1e-12; b += step) config.beta_grid.push_back(b);
            }
        }
        if (j.contains("restarts")) config.restarts = j["restarts"].get<int>();
        if (j.contains("optimizer")) config.optimizer = optimizer_from_json(j["optimizer"]);
        if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("output_path")) config.output_path = j["output_path"].get<std::string>();
        if (j.contains("exact_errors")) config.exact_errors = j["exact_errors"].get<bool>();
        if (j.contains("exact_max_nodes"))
            config.exact_max_nodes = j["exact_max_nodes"].get<int>();
        config.validate();
        return config;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed sweep config: ") + e.what());
    }
}

OptimizerConfig optimizer_config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed optimizer config: ") + e.what());
    }
    try {
        return optimizer_from_json(j.contains("optimizer") ? j["optimizer"] : j);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed optimizer config: ") + e.what());
    }
}

std::vector<std::string> sweep_preset_names() { return {"grid5", "grid8", "k10", "er25"}; }

SweepConfig sweep_preset(const std::string& name, bool spin_glass, std::uint64_t seed) {
    SweepConfig config;
    if (name == "grid5") {
        config.family = grid_family(5, 5, 0);
    } else if (name == "grid8") {
        config.family = grid_family(8, 8, 0);
        config.exact_errors = false; // 2^64 states: Bethe-only preset
    } else if (name == "k10") {
        config.family = complete_family(10, 0);
    } else if (name == "er25") {
        config.family = erdos_renyi_family(25, 0.2, 0);
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    config.family.coupling_range = spin_glass ? std::make_pair(-1.0, 1.0)
                                              : std::make_pair(0.0, 1.0);
    config.family.field_range = {-0.125, 0.125};
    // The nominal grid starts at beta = 0; F_B carries a 1/beta factor, so the
    // first point is 1e-3 instead.
    config.beta_grid.push_back(1e-3);
    for (int k = 1; k <= 20; ++k) config.beta_grid.push_back(0.1 * k);
    config.model_count = 20;
    config.restarts = 20;
    config.seed = seed;
    config.output_path = name + (spin_glass ? "_glass" : "_ferro");
    return config;
}

} // namespace bethe
