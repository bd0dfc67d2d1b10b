#include <cmath>
#include <fstream>
#include <stdexcept>
#include <numeric>

#include "doctest.h"

#include "bethe/convexity.hpp"
#include "bethe/edge_terms.hpp"
#include "bethe/exact.hpp"
#include "bethe/free_energy.hpp"
#include "bethe/optimizer.hpp"
#include "bethe/rng.hpp"
#include "helpers.hpp"

using namespace bethe;
using doctest::Approx;

TEST_CASE("config validation") {
    OptimizerConfig bad;
    bad.tau1 = 0.95; // violates tau1 < tau2
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = OptimizerConfig{};
    bad.projection_shrink = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = OptimizerConfig{};
    bad.expansion = 0.9;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_NOTHROW(OptimizerConfig{}.validate());
}

TEST_CASE("decoupled model has the closed-form minimizer q_i = sigmoid(2 beta theta_i)") {
    SplitMix64 rng(81);
    for (double beta : {0.5, 1.3}) {
        std::vector<std::tuple<int, int, double>> edges{{0, 1, 0.0}, {2, 3, 0.0}, {1, 4, 0.0}};
        std::vector<double> fields(5);
        for (double& f : fields) f = rng.uniform(-1.0, 1.0);
        Model m = make_model(5, edges, fields, beta);

        const MinimizationResult res =
            bethe_min(m, test_helpers::random_interior(5, rng), OptimizerConfig{}, 7);
        REQUIRE(res.converged);
        for (int i = 0; i < 5; ++i)
            CHECK(res.q_star[i] == Approx(sigmoid(2.0 * beta * fields[i])).epsilon(1e-6));
    }
}

TEST_CASE("wolfe line search returns steps satisfying the two conditions") {
    SplitMix64 rng(82);
    OptimizerConfig config;
    for (int trial = 0; trial < 30; ++trial) {
        Model m = test_helpers::random_model(8, 0.5, -1.0, 1.0, 0.3 + 0.1 * trial, 8200 + trial);
        const std::vector<double> q = test_helpers::random_interior(m.node_count, rng, 0.2, 0.8);
        const std::vector<double> grad = bethe_gradient(m, q);

        // steepest-descent segment, projected into the box
        double rho_max = 0.5 / std::max(1.0, std::sqrt(std::inner_product(
                                                  grad.begin(), grad.end(), grad.begin(), 0.0)));
        std::vector<double> head(m.node_count);
        for (;;) {
            for (int i = 0; i < m.node_count; ++i) head[i] = q[i] - rho_max * grad[i];
            if (inside_box(head)) break;
            rho_max *= 0.7;
        }

        const WolfeResult ls = wolfe_line_search(m, q, head, config, rng);
        REQUIRE(ls.status != WolfeStatus::failed);
        std::vector<double> direction(m.node_count);
        for (int i = 0; i < m.node_count; ++i) direction[i] = head[i] - q[i];
        double slope0 = 0.0;
        for (int i = 0; i < m.node_count; ++i) slope0 += direction[i] * grad[i];

        std::vector<double> at(m.node_count);
        for (int i = 0; i < m.node_count; ++i) at[i] = q[i] + ls.rho * direction[i];
        const double f0 = bethe_free_energy(m, q);
        const double f1 = bethe_free_energy(m, at);
        CHECK(f1 <= f0 + config.tau1 * ls.rho * slope0 + 1e-14); // W1
        if (ls.status == WolfeStatus::both) {
            const std::vector<double> g1 = bethe_gradient(m, at);
            double slope1 = 0.0;
            for (int i = 0; i < m.node_count; ++i) slope1 += direction[i] * g1[i];
            CHECK(slope1 >= config.tau2 * slope0 - 1e-14); // W2
        }
        CHECK(ls.rho > 0.0);
        CHECK(ls.rho <= 1.0);
    }
}

TEST_CASE("wolfe line search rejects non-descent directions") {
    Model m = test_helpers::k4(1.0, 0.0, 0.4);
    const std::vector<double> q(4, 0.4);
    std::vector<double> grad = bethe_gradient(m, q);
    std::vector<double> uphill(4);
    for (int i = 0; i < 4; ++i) uphill[i] = clamp_unit(q[i] + 0.05 * grad[i]);
    SplitMix64 rng(83);
    CHECK_THROWS_AS(wolfe_line_search(m, q, uphill, OptimizerConfig{}, rng),
                    std::invalid_argument);
}

TEST_CASE("monotone descent and feasible iterates") {
    SplitMix64 rng(84);
    OptimizerConfig config;
    config.record_trace = true;
    for (int trial = 0; trial < 6; ++trial) {
        Model m = test_helpers::random_model(10, 0.4, -1.0, 1.0, 0.4 + 0.3 * trial, 8400 + trial);
        const MinimizationResult res =
            bethe_min(m, test_helpers::random_interior(m.node_count, rng), config, trial);
        REQUIRE(res.trace.size() >= 2);
        for (std::size_t k = 1; k < res.trace.size(); ++k)
            CHECK(res.trace[k].f <= res.trace[k - 1].f + 1e-12);
        CHECK(inside_box(res.q_star));
        if (res.converged) CHECK(res.grad_norm <= config.epsilon);
    }
}

TEST_CASE("k4 ferromagnet: unique center minimum below the threshold") {
    OptimizerConfig config;
    const MultiRestartResult mr =
        multi_restart_minimize(test_helpers::k4(1.0, 0.0, 0.3), 30, 17, config);
    CHECK(mr.converged_count == 30);
    CHECK(mr.distinct_minima == 1);
    for (const MinimizationResult& run : mr.runs)
        for (double v : run.q_star) CHECK(v == Approx(0.5).epsilon(1e-4));
}

TEST_CASE("k4 ferromagnet: two symmetric minima beyond the threshold") {
    OptimizerConfig config;
    const MultiRestartResult mr =
        multi_restart_minimize(test_helpers::k4(1.0, 0.0, 1.0), 40, 18, config);
    CHECK(mr.distinct_minima == 2);
    REQUIRE(mr.cluster_reps.size() == 2);
    const double c0 = mr.cluster_reps[0][0];
    const double c1 = mr.cluster_reps[1][0];
    CHECK(c0 + c1 == Approx(1.0).epsilon(1e-3)); // reflection pair c, 1 - c
    CHECK(std::fabs(c0 - 0.5) > 0.2);
    // gradient is still zero at the abandoned center
    for (double g : bethe_gradient(test_helpers::k4(1.0, 0.0, 1.0), std::vector<double>(4, 0.5)))
        CHECK(std::fabs(g) < 1e-12);
}

TEST_CASE("k4 antiferromagnet keeps its center minimum at any temperature") {
    OptimizerConfig config;
    for (double beta : {0.5, 2.0}) {
        const MultiRestartResult mr =
            multi_restart_minimize(test_helpers::k4(-1.0, 0.0, beta), 25, 19, config);
        CHECK(mr.distinct_minima == 1);
        for (double v : mr.cluster_reps[0]) CHECK(v == Approx(0.5).epsilon(1e-4));
    }
}

TEST_CASE("convex-certified models collapse to a single cluster") {
    OptimizerConfig config;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        Model base = test_helpers::random_model(8, 0.5, -1.0, 1.0, 1.0, 8500 + seed);
        const double star = critical_beta_diag_dominance(base, 5.0);
        if (!std::isfinite(star)) continue;
        Model m = base.with_beta(0.9 * star);
        if (!certify(m).diag_dominance_convex) continue;
        const MultiRestartResult mr = multi_restart_minimize(m, 20, seed, config);
        CHECK(mr.distinct_minima == 1);
    }
}

TEST_CASE("tree minimization reaches the exact free energy") {
    OptimizerConfig config;
    config.epsilon = 1e-9;
    for (std::uint64_t seed : {4ull, 5ull}) {
        Model m = test_helpers::random_tree(9, -1.0, 1.0, -1.0, 1.0, 1.0, seed);
        const ExactSolution sol = brute_force_solve(m);
        const MultiRestartResult mr = multi_restart_minimize(m, 5, seed, config);
        const MinimizationResult& best = mr.runs[mr.best_run];
        REQUIRE(best.converged);
        CHECK(std::fabs(best.f_value - (-sol.log_z / m.beta)) < 1e-8);
        for (int i = 0; i < m.node_count; ++i)
            CHECK(best.q_star[i] == Approx(sol.singleton[i]).epsilon(1e-6));
    }
}

TEST_CASE("random SPD initialization still converges") {
    OptimizerConfig config;
    config.random_spd_init = true;
    Model m = test_helpers::k4(1.0, 0.0, 0.3);
    SplitMix64 rng(85);
    const MinimizationResult res =
        bethe_min(m, test_helpers::random_interior(4, rng), config, 99);
    REQUIRE(res.converged);
    for (double v : res.q_star) CHECK(v == Approx(0.5).epsilon(1e-4));
}

TEST_CASE("trace export") {
    OptimizerConfig config;
    config.record_trace = true;
    Model m = test_helpers::k4(1.0, 0.0, 0.3);
    SplitMix64 rng(87);
    const MinimizationResult res =
        bethe_min(m, test_helpers::random_interior(4, rng), config, 3);
    REQUIRE(res.trace.size() >= 2);
    write_trace_csv(res, "/tmp/bethe_test_trace.csv");
    std::ifstream in("/tmp/bethe_test_trace.csv");
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "iteration,f,grad_norm,step");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == static_cast<int>(res.trace.size()));
    CHECK_THROWS_AS(write_trace_csv(res, "/nonexistent_dir/trace.csv"), std::runtime_error);
}

TEST_CASE("restart fleet is deterministic for a fixed seed") {
    OptimizerConfig config;
    Model m = test_helpers::random_model(9, 0.4, -1.0, 1.0, 1.1, 86);
    const MultiRestartResult a = multi_restart_minimize(m, 12, 1234, config);
    const MultiRestartResult b = multi_restart_minimize(m, 12, 1234, config);
    REQUIRE(a.runs.size() == b.runs.size());
    for (std::size_t r = 0; r < a.runs.size(); ++r) {
        CHECK(a.runs[r].f_value == b.runs[r].f_value);
        CHECK(a.runs[r].q_star == b.runs[r].q_star);
        CHECK(a.runs[r].iterations == b.runs[r].iterations);
    }
    CHECK(a.distinct_minima == b.distinct_minima);
    CHECK(a.best_run == b.best_run);
}
