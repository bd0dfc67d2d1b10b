#pragma once

#include <cmath>
#include <tuple>
#include <vector>

#include "bethe/model.hpp"
#include "bethe/rng.hpp"

namespace test_helpers {

using bethe::Model;
using bethe::SplitMix64;

// Erdos-Renyi-style random model with couplings bounded away from zero and
// an optional minimum-degree requirement (resamples until satisfied).
inline Model random_model(int n, double edge_p, double j_lo, double j_hi, double beta,
                          std::uint64_t seed, int min_degree = 0) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        SplitMix64 rng(seed + attempt * 1000003ull);
        std::vector<std::tuple<int, int, double>> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.uniform() < edge_p) {
                    double coupling = rng.uniform(j_lo, j_hi);
                    if (std::fabs(coupling) < 0.05) coupling = coupling < 0 ? -0.05 : 0.05;
                    edges.emplace_back(i, j, coupling);
                }
        std::vector<double> fields(n);
        for (double& f : fields) f = rng.uniform(-1.0, 1.0);
        Model model = bethe::make_model(n, edges, fields, beta);
        bool ok = true;
        for (int i = 0; i < n; ++i)
            if (model.degree(i) < min_degree) ok = false;
        if (ok) return model;
    }
}

// Random recursive tree: node i attaches to a uniform earlier node.
inline Model random_tree(int n, double j_lo, double j_hi, double t_lo, double t_hi, double beta,
                         std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 1; i < n; ++i)
        edges.emplace_back(static_cast<int>(rng.below(i)), i, rng.uniform(j_lo, j_hi));
    std::vector<double> fields(n);
    for (double& f : fields) f = rng.uniform(t_lo, t_hi);
    return bethe::make_model(n, edges, fields, beta);
}

inline Model homogeneous_complete(int n, double coupling, double theta, double beta) {
    std::vector<std::tuple<int, int, double>> edges;
    for (const bethe::Edge& e : bethe::complete_edges(n)) edges.emplace_back(e.i, e.j, coupling);
    return bethe::make_model(n, edges, std::vector<double>(n, theta), beta);
}

inline Model k4(double coupling, double theta, double beta) {
    return homogeneous_complete(4, coupling, theta, beta);
}

inline Model path_graph(int n, double coupling, double beta) {
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1, coupling);
    return bethe::make_model(n, edges, std::vector<double>(n, 0.0), beta);
}

// Star: node 0 joined to n-1 leaves with a uniform coupling.
inline Model star_graph(int leaves, double coupling, double beta) {
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 1; i <= leaves; ++i) edges.emplace_back(0, i, coupling);
    return bethe::make_model(leaves + 1, edges, std::vector<double>(leaves + 1, 0.0), beta);
}

inline std::vector<double> random_interior(int n, SplitMix64& rng, double lo = 0.05,
                                           double hi = 0.95) {
    std::vector<double> q(n);
    for (double& v : q) v = rng.uniform(lo, hi);
    return q;
}

} // namespace test_helpers
