#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace bethe {

// Undirected edge, stored canonically with i < j.
struct Edge {
    int i = 0;
    int j = 0;
};

// Binary pairwise model with energy
//   E(x) = -sum_{(i,j) in E} J_ij x_i x_j - sum_i theta_i x_i,   x_i in {+1,-1},
// at inverse temperature beta > 0. Immutable after construction; safe to share
// across threads.
struct Model {
    int node_count = 0;
    double beta = 1.0;
    std::vector<Edge> edges;       // sorted lexicographically, no duplicates
    std::vector<double> couplings; // J_ij, aligned with edges
    std::vector<double> fields;    // theta_i, one per node

    // adjacency[i] lists (neighbor, edge index) pairs in ascending neighbor order.
    std::vector<std::vector<std::pair<int, int>>> adjacency;

    int degree(int i) const;
    int edge_count() const { return static_cast<int>(edges.size()); }

    // Same topology and potentials at a different inverse temperature.
    Model with_beta(double new_beta) const;
};

// Validates, canonicalizes (edge endpoints ordered, edge list sorted) and
// builds adjacency. Throws std::invalid_argument on malformed input.
Model make_model(int node_count, const std::vector<std::tuple<int, int, double>>& coupled_edges,
                 const std::vector<double>& fields, double beta);

// Fixed graph topologies used by the experiment families and tests.
std::vector<Edge> grid_edges(int rows, int cols); // 4-neighbor lattice
std::vector<Edge> complete_edges(int n);

struct GraphFamily {
    enum class Kind { grid, complete, erdos_renyi };

    Kind kind = Kind::grid;
    int rows = 0, cols = 0; // grid
    int n = 0;              // complete / erdos_renyi
    double p = 0.0;         // erdos_renyi edge probability

    std::pair<double, double> coupling_range{0.0, 1.0};
    std::pair<double, double> field_range{-0.125, 0.125};
    std::uint64_t seed = 0;

    int node_count() const;
    std::string describe() const;
};

GraphFamily grid_family(int rows, int cols, std::uint64_t seed);
GraphFamily complete_family(int n, std::uint64_t seed);
GraphFamily erdos_renyi_family(int n, double p, std::uint64_t seed);

// Samples topology (Erdos-Renyi only), couplings and fields from the family's
// SplitMix64 stream. Deterministic for a fixed family seed; beta only scales
// the Boltzmann weights and does not consume randomness, so the same seed at
// two betas yields the same graph and potentials.
Model build_model(const GraphFamily& family, double beta);

// JSON model file format:
//   {"nodes": N, "beta": b, "edges": [[i, j, J], ...], "fields": [t0, ...]}
// Reals round-trip bit exactly.
std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

} // namespace bethe
