#include "bethe/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"

namespace bethe {

namespace {

void check_size(const Model& model, const ExactOptions& options) {
    if (model.node_count > options.max_nodes)
        throw std::invalid_argument("model exceeds brute-force node limit");
    if (model.node_count >= 63)
        throw std::invalid_argument("model exceeds enumerable configuration space");
}

double config_energy(const Model& model, const std::vector<int>& spin) {
    double energy = 0.0;
    for (int e = 0; e < model.edge_count(); ++e)
        energy -= model.couplings[e] * spin[model.edges[e].i] * spin[model.edges[e].j];
    for (int i = 0; i < model.node_count; ++i) energy -= model.fields[i] * spin[i];
    return energy;
}

ExactSolution assemble(const Model& model, double shift, double z, const std::vector<double>& s,
                       const std::vector<double>& pp) {
    ExactSolution solution;
    solution.log_z = shift + std::log(z);
    solution.singleton.resize(model.node_count);
    for (int i = 0; i < model.node_count; ++i)
        solution.singleton[i] = std::min(1.0, std::max(0.0, s[i] / z));
    solution.pairwise.resize(model.edge_count());
    for (int e = 0; e < model.edge_count(); ++e) {
        const int i = model.edges[e].i;
        const int j = model.edges[e].j;
        const double p_pp = pp[e] / z;
        const double p_pm = (s[i] - pp[e]) / z;
        const double p_mp = (s[j] - pp[e]) / z;
        const double p_mm = (z - s[i] - s[j] + pp[e]) / z;
        for (int k = 0; k < 4; ++k) {
            const double v = (k == 0 ? p_pp : k == 1 ? p_pm : k == 2 ? p_mp : p_mm);
            solution.pairwise[e][k] = std::min(1.0, std::max(0.0, v));
        }
    }
    return solution;
}

// Greedy independent set among low-degree nodes; the returned nodes become
// the innermost enumeration bits. No two of them share an edge, so the local
// field of an inner node is constant while only inner bits change.
std::vector<int> pick_inner_nodes(const Model& model, int limit) {
    std::vector<int> order(model.node_count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const int da = model.degree(a), db = model.degree(b);
        return da != db ? da < db : a < b;
    });
    std::vector<char> blocked(model.node_count, 0);
    std::vector<int> inner;
    for (int node : order) {
        if (static_cast<int>(inner.size()) >= limit) break;
        if (blocked[node]) continue;
        inner.push_back(node);
        for (const auto& [nbr, e] : model.adjacency[node]) blocked[nbr] = 1;
    }
    std::sort(inner.begin(), inner.end());
    return inner;
}

struct ChunkAccum {
    double shift = -std::numeric_limits<double>::infinity();
    double z = 0.0;
    double z_comp = 0.0; // Kahan compensation
    std::vector<double> s;
    std::vector<double> pp;
};

} // namespace

ExactSolution brute_force_solve_reference(const Model& model, const ExactOptions& options) {
    check_size(model, options);
    const int n = model.node_count;
    const std::uint64_t total = 1ull << n;

    std::vector<int> spin(n);
    auto fill_spins = [&](std::uint64_t config) {
        for (int i = 0; i < n; ++i) spin[i] = (config >> i) & 1 ? 1 : -1;
    };

    double shift = -std::numeric_limits<double>::infinity();
    for (std::uint64_t c = 0; c < total; ++c) {
        fill_spins(c);
        shift = std::max(shift, -model.beta * config_energy(model, spin));
    }

    double z = 0.0;
    std::vector<double> s(n, 0.0);
    std::vector<double> pp(model.edge_count(), 0.0);
    for (std::uint64_t c = 0; c < total; ++c) {
        fill_spins(c);
        const double w = std::exp(-model.beta * config_energy(model, spin) - shift);
        z += w;
        for (int i = 0; i < n; ++i)
            if (spin[i] > 0) s[i] += w;
        for (int e = 0; e < model.edge_count(); ++e)
            if (spin[model.edges[e].i] > 0 && spin[model.edges[e].j] > 0) pp[e] += w;
    }
    return assemble(model, shift, z, s, pp);
}

ExactSolution brute_force_solve(const Model& model, const ExactOptions& options) {
    check_size(model, options);
    const int n = model.node_count;
    const int n_edges = model.edge_count();

    const std::vector<int> inner = pick_inner_nodes(model, std::min(12, n));
    const int b = static_cast<int>(inner.size());
    std::vector<int> inner_slot(n, -1);
    for (int t = 0; t < b; ++t) inner_slot[inner[t]] = t;
    std::vector<int> outer;
    for (int i = 0; i < n; ++i)
        if (inner_slot[i] < 0) outer.push_back(i);
    const int m = static_cast<int>(outer.size());

    // Edge classification: an inner endpoint is unique (independent set).
    struct InnerEdge {
        int edge, slot, other;
    };
    std::vector<InnerEdge> inner_edges;
    std::vector<int> outer_edges;
    for (int e = 0; e < n_edges; ++e) {
        const int i = model.edges[e].i;
        const int j = model.edges[e].j;
        if (inner_slot[i] >= 0)
            inner_edges.push_back({e, inner_slot[i], j});
        else if (inner_slot[j] >= 0)
            inner_edges.push_back({e, inner_slot[j], i});
        else
            outer_edges.push_back(e);
    }

    // Fixed chunk grid over the top outer bits: the merge order (and thus the
    // result) is independent of the thread count.
    const int chunk_bits = std::min(8, m);
    const int n_chunks = 1 << chunk_bits;
    const int mid_bits = m - chunk_bits;
    const std::uint64_t inner_count = 1ull << b;

    std::vector<ChunkAccum> chunks(n_chunks);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (!omp_in_parallel())
#endif
    for (int chunk = 0; chunk < n_chunks; ++chunk) {
        ChunkAccum acc;
        acc.s.assign(n, 0.0);
        acc.pp.assign(n_edges, 0.0);

        std::vector<int> spin(n, -1);
        std::vector<double> g(b, 0.0);     // a-change of flipping inner slot t to +1
        std::vector<double> s_blk(b, 0.0); // block-local weighted +1 indicators

        const std::uint64_t blocks = 1ull << mid_bits;
        for (std::uint64_t mid = 0; mid < blocks; ++mid) {
            const std::uint64_t outer_config =
                (static_cast<std::uint64_t>(chunk) << mid_bits) | mid;
            for (int t = 0; t < m; ++t) spin[outer[t]] = (outer_config >> t) & 1 ? 1 : -1;
            for (int i : inner) spin[i] = -1;

            // Fresh base energy each block: no drift across the enumeration.
            const double a_base = -model.beta * config_energy(model, spin);
            double a_max = a_base;
            for (int t = 0; t < b; ++t) {
                const int node = inner[t];
                double field = model.fields[node];
                for (const auto& [nbr, e] : model.adjacency[node])
                    field += model.couplings[e] * spin[nbr];
                g[t] = 2.0 * model.beta * field;
                if (g[t] > 0.0) a_max += g[t];
            }

            if (a_max > acc.shift) {
                const double factor =
                    std::isfinite(acc.shift) ? std::exp(acc.shift - a_max) : 0.0;
                acc.z *= factor;
                acc.z_comp *= factor;
                for (double& v : acc.s) v *= factor;
                for (double& v : acc.pp) v *= factor;
                acc.shift = a_max;
            }

            double w_blk = 0.0;
            std::fill(s_blk.begin(), s_blk.end(), 0.0);
            double a = a_base;
            std::uint64_t mask = 0;
            w_blk += std::exp(a - acc.shift);
            for (std::uint64_t step = 1; step < inner_count; ++step) {
                const int t = std::countr_zero(step); // Gray code flip position
                mask ^= 1ull << t;
                a += (mask >> t) & 1 ? g[t] : -g[t];
                const double w = std::exp(a - acc.shift);
                w_blk += w;
                for (std::uint64_t rest = mask; rest; rest &= rest - 1)
                    s_blk[std::countr_zero(rest)] += w;
            }

            // Kahan-compensated partition sum.
            const double y = w_blk - acc.z_comp;
            const double t_sum = acc.z + y;
            acc.z_comp = (t_sum - acc.z) - y;
            acc.z = t_sum;

            for (int t = 0; t < b; ++t) acc.s[inner[t]] += s_blk[t];
            for (int t = 0; t < m; ++t)
                if (spin[outer[t]] > 0) acc.s[outer[t]] += w_blk;
            for (const InnerEdge& ie : inner_edges)
                if (spin[ie.other] > 0) acc.pp[ie.edge] += s_blk[ie.slot];
            for (int e : outer_edges)
                if (spin[model.edges[e].i] > 0 && spin[model.edges[e].j] > 0)
                    acc.pp[e] += w_blk;
        }
        chunks[chunk] = std::move(acc);
    }

    double shift = -std::numeric_limits<double>::infinity();
    for (const ChunkAccum& c : chunks) shift = std::max(shift, c.shift);
    double z = 0.0;
    std::vector<double> s(n, 0.0);
    std::vector<double> pp(n_edges, 0.0);
    for (const ChunkAccum& c : chunks) {
        const double factor = std::exp(c.shift - shift);
        z += c.z * factor;
        for (int i = 0; i < n; ++i) s[i] += c.s[i] * factor;
        for (int e = 0; e < n_edges; ++e) pp[e] += c.pp[e] * factor;
    }
    return assemble(model, shift, z, s, pp);
}

double gibbs_free_energy_at_minimum(const Model& model, const ExactOptions& options) {
    return -brute_force_solve(model, options).log_z / model.beta;
}

std::string exact_to_json(const ExactSolution& solution, const Model& model) {
    nlohmann::json j;
    j["log_z"] = solution.log_z;
    j["singleton"] = solution.singleton;
    auto pairwise = nlohmann::json::array();
    for (int e = 0; e < model.edge_count(); ++e) {
        pairwise.push_back({{"i", model.edges[e].i},
                            {"j", model.edges[e].j},
                            {"table", solution.pairwise[e]}});
    }
    j["pairwise"] = std::move(pairwise);
    return j.dump(2);
}

} // namespace bethe
