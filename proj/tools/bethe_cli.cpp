// Command-line front end: model generation, exact solving, Bethe
// minimization, convexity certification, threshold tables and full sweeps.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "bethe/convexity.hpp"
#include "bethe/exact.hpp"
#include "bethe/free_energy.hpp"
#include "bethe/metrics.hpp"
#include "bethe/model.hpp"
#include "bethe/optimizer.hpp"
#include "bethe/sweep.hpp"

using namespace bethe;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

struct GenerateArgs {
    std::string family = "grid";
    int rows = 5, cols = 5, n = 10;
    double p = 0.2;
    double beta = 1.0;
    double j_min = 0.0, j_max = 1.0;
    double theta_min = -0.125, theta_max = 0.125;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bethe free-energy toolbox: convexity certificates, BETHE-MIN and sweeps"};
    app.require_subcommand(1);

    std::uint64_t global_seed = 0;
    std::string global_out;
    std::string global_config;
    app.add_option("--seed", global_seed, "seed for the run's random streams");
    app.add_option("--out", global_out, "output path");
    app.add_option("--config", global_config, "JSON configuration file");

    // generate
    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "sample a model from a graph family");
    generate->fallthrough();
    generate->add_option("--family", gen.family, "grid | complete | erdos-renyi")
        ->check(CLI::IsMember({"grid", "complete", "erdos-renyi"}));
    generate->add_option("--rows", gen.rows, "grid rows");
    generate->add_option("--cols", gen.cols, "grid cols");
    generate->add_option("--n", gen.n, "node count (complete / erdos-renyi)");
    generate->add_option("--p", gen.p, "edge probability (erdos-renyi)");
    generate->add_option("--beta", gen.beta, "inverse temperature");
    generate->add_option("--j-min", gen.j_min, "coupling range lower end");
    generate->add_option("--j-max", gen.j_max, "coupling range upper end");
    generate->add_option("--theta-min", gen.theta_min, "field range lower end");
    generate->add_option("--theta-max", gen.theta_max, "field range upper end");

    // exact
    std::string exact_model;
    int exact_max_nodes = 25;
    auto* exact_cmd = app.add_subcommand("exact", "brute-force partition function and marginals");
    exact_cmd->fallthrough();
    exact_cmd->add_option("--model", exact_model, "model JSON file")->required();
    exact_cmd->add_option("--max-nodes", exact_max_nodes, "enumeration resource guard");

    // minimize
    std::string min_model, min_trace;
    int min_restarts = 20;
    double min_epsilon = 1e-6;
    auto* minimize = app.add_subcommand("minimize", "multi-restart BETHE-MIN");
    minimize->fallthrough();
    minimize->add_option("--model", min_model, "model JSON file")->required();
    minimize->add_option("--restarts", min_restarts, "number of random restarts");
    auto* min_epsilon_opt =
        minimize->add_option("--epsilon", min_epsilon, "gradient-norm tolerance");
    minimize->add_option("--trace", min_trace, "per-iteration CSV for the best run");

    // certify
    std::string cert_model;
    double cert_beta_max = kDefaultBetaMax;
    auto* certify_cmd = app.add_subcommand("certify", "convexity certificates and thresholds");
    certify_cmd->fallthrough();
    certify_cmd->add_option("--model", cert_model, "model JSON file")->required();
    certify_cmd->add_option("--beta-max", cert_beta_max, "bisection bracket for beta*");

    // thresholds
    int thr_degree = 3, thr_degree_max = 0;
    double thr_coupling = 1.0;
    auto* thresholds = app.add_subcommand("thresholds", "symmetric-model critical temperatures");
    thresholds->fallthrough();
    thresholds->add_option("--degree", thr_degree, "uniform degree d >= 3");
    thresholds->add_option("--degree-max", thr_degree_max, "print a table up to this degree");
    thresholds->add_option("--coupling", thr_coupling, "uniform coupling strength");

    // sweep
    std::string sweep_preset_name;
    bool sweep_spin_glass = false, sweep_csv_only = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "ensemble sweep over a beta grid");
    sweep_cmd->fallthrough();
    sweep_cmd->add_option("--preset", sweep_preset_name, "grid5 | grid8 | k10 | er25");
    sweep_cmd->add_flag("--spin-glass", sweep_spin_glass, "couplings U(-1,1) instead of U(0,1)");
    sweep_cmd->add_flag("--csv-only", sweep_csv_only, "skip the JSON twin");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            GraphFamily family;
            if (gen.family == "grid")
                family = grid_family(gen.rows, gen.cols, global_seed);
            else if (gen.family == "complete")
                family = complete_family(gen.n, global_seed);
            else
                family = erdos_renyi_family(gen.n, gen.p, global_seed);
            family.coupling_range = {gen.j_min, gen.j_max};
            family.field_range = {gen.theta_min, gen.theta_max};
            const Model model = build_model(family, gen.beta);
            const std::string text = model_to_json(model);
            if (global_out.empty()) {
                std::cout << text << "\n";
            } else {
                write_file(global_out, text + "\n");
                std::cout << family.describe() << ": " << model.node_count << " nodes, "
                          << model.edge_count() << " edges -> " << global_out << "\n";
            }
        } else if (exact_cmd->parsed()) {
            const Model model = load_model(exact_model);
            ExactOptions options;
            options.max_nodes = exact_max_nodes;
            const ExactSolution sol = brute_force_solve(model, options);
            std::printf("log_z %.17g\n", sol.log_z);
            std::printf("gibbs_free_energy %.17g\n", -sol.log_z / model.beta);
            if (!global_out.empty()) write_file(global_out, exact_to_json(sol, model) + "\n");
        } else if (minimize->parsed()) {
            const Model model = load_model(min_model);
            OptimizerConfig config;
            if (!global_config.empty())
                config = optimizer_config_from_json(read_file(global_config));
            if (min_epsilon_opt->count() > 0) config.epsilon = min_epsilon;
            config.record_trace = !min_trace.empty();
            const MultiRestartResult mr =
                multi_restart_minimize(model, min_restarts, global_seed, config);
            const MinimizationResult& best = mr.runs[mr.best_run];
            std::printf("converged %d/%d  distinct_minima %d\n", mr.converged_count, min_restarts,
                        mr.distinct_minima);
            std::printf("f %.17g\nlog_z_bethe %.17g\ngrad_norm %.3e\niterations %d\n",
                        best.f_value, -model.beta * best.f_value, best.grad_norm,
                        best.iterations);
            if (!min_trace.empty()) write_trace_csv(best, min_trace);
            if (!global_out.empty()) {
                nlohmann::json j{{"f", best.f_value},
                                 {"log_z_bethe", -model.beta * best.f_value},
                                 {"grad_norm", best.grad_norm},
                                 {"iterations", best.iterations},
                                 {"converged", best.converged},
                                 {"converged_runs", mr.converged_count},
                                 {"distinct_minima", mr.distinct_minima},
                                 {"q", best.q_star}};
                write_file(global_out, j.dump(2) + "\n");
            }
        } else if (certify_cmd->parsed()) {
            const Model model = load_model(cert_model);
            const ConvexityReport report = certify(model, cert_beta_max);
            std::printf("diag_convex %d\nsum_convex %d\n", (int)report.diag_dominance_convex,
                        (int)report.sum_decomposition_convex);
            if (std::isfinite(report.beta_star_diag))
                std::printf("beta_star_diag %.6g\n", report.beta_star_diag);
            else
                std::printf("beta_star_diag none<=%.3g\n", cert_beta_max);
            if (std::isfinite(report.beta_star_sum))
                std::printf("beta_star_sum %.6g\n", report.beta_star_sum);
            else
                std::printf("beta_star_sum inf\n");
            if (!global_out.empty())
                write_file(global_out, convexity_report_to_json(report, model) + "\n");
        } else if (thresholds->parsed()) {
            const int d_hi = thr_degree_max > 0 ? thr_degree_max : thr_degree;
            std::printf("d,exact,dobrushin,simon,diag_dominance,heskes\n");
            for (int d = thr_degree; d <= d_hi; ++d) {
                const SymmetricThresholds t = symmetric_model_thresholds(d, thr_coupling);
                std::printf("%d,%.10g,%.10g,%.10g,%.10g,%.10g\n", d, t.exact, t.dobrushin,
                            t.simon, t.diag_dominance, t.heskes);
            }
        } else if (sweep_cmd->parsed()) {
            SweepConfig config;
            if (!global_config.empty())
                config = sweep_config_from_json(read_file(global_config));
            else if (!sweep_preset_name.empty())
                config = sweep_preset(sweep_preset_name, sweep_spin_glass, global_seed);
            else
                throw std::invalid_argument("sweep needs --config or --preset");
            if (global_seed != 0) config.seed = global_seed;
            if (!global_out.empty()) config.output_path = global_out;
            const SweepResult result = run_sweep(config);
            const EmitPaths paths = emit_tables(result, sweep_csv_only);
            std::printf("cells %zu  convergence %.4f\n", result.cells.size(),
                        result.total_runs
                            ? (double)result.converged_runs / (double)result.total_runs
                            : 0.0);
            std::printf("wrote %s\nwrote %s\n", paths.long_csv.c_str(),
                        paths.aggregate_csv.c_str());
            if (!paths.json.empty()) std::printf("wrote %s\n", paths.json.c_str());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
