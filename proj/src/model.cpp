#include "bethe/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "bethe/rng.hpp"

namespace bethe {

int Model::degree(int i) const {
    if (i < 0 || i >= node_count) throw std::invalid_argument("node index out of range");
    return static_cast<int>(adjacency[i].size());
}

Model Model::with_beta(double new_beta) const {
    if (!(new_beta > 0.0) || !std::isfinite(new_beta))
        throw std::invalid_argument("beta must be positive and finite");
    Model copy = *this;
    copy.beta = new_beta;
    return copy;
}

Model make_model(int node_count, const std::vector<std::tuple<int, int, double>>& coupled_edges,
                 const std::vector<double>& fields, double beta) {
    if (node_count < 1) throw std::invalid_argument("node_count must be >= 1");
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("beta must be positive and finite");
    if (static_cast<int>(fields.size()) != node_count)
        throw std::invalid_argument("fields size must equal node_count");
    for (double theta : fields)
        if (!std::isfinite(theta)) throw std::invalid_argument("non-finite field");

    struct Entry {
        int i, j;
        double coupling;
    };
    std::vector<Entry> entries;
    entries.reserve(coupled_edges.size());
    for (const auto& [a, b, coupling] : coupled_edges) {
        if (a < 0 || a >= node_count || b < 0 || b >= node_count)
            throw std::invalid_argument("edge endpoint out of range");
        if (a == b) throw std::invalid_argument("self-loop edge");
        if (!std::isfinite(coupling)) throw std::invalid_argument("non-finite coupling");
        entries.push_back({std::min(a, b), std::max(a, b), coupling});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        return x.i != y.i ? x.i < y.i : x.j < y.j;
    });
    for (std::size_t k = 1; k < entries.size(); ++k)
        if (entries[k].i == entries[k - 1].i && entries[k].j == entries[k - 1].j)
            throw std::invalid_argument("duplicate edge");

    Model model;
    model.node_count = node_count;
    model.beta = beta;
    model.fields = fields;
    model.edges.reserve(entries.size());
    model.couplings.reserve(entries.size());
    for (const Entry& e : entries) {
        model.edges.push_back({e.i, e.j});
        model.couplings.push_back(e.coupling);
    }
    model.adjacency.assign(node_count, {});
    for (int e = 0; e < model.edge_count(); ++e) {
        model.adjacency[model.edges[e].i].push_back({model.edges[e].j, e});
        model.adjacency[model.edges[e].j].push_back({model.edges[e].i, e});
    }
    for (auto& neighbors : model.adjacency)
        std::sort(neighbors.begin(), neighbors.end());
    return model;
}

std::vector<Edge> grid_edges(int rows, int cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("grid dimensions must be >= 1");
    std::vector<Edge> edges;
    auto id = [cols](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1)});
            if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c)});
        }
    return edges;
}

std::vector<Edge> complete_edges(int n) {
    if (n < 2) throw std::invalid_argument("complete graph needs n >= 2");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
    return edges;
}

int GraphFamily::node_count() const {
    switch (kind) {
        case Kind::grid: return rows * cols;
        case Kind::complete: return n;
        case Kind::erdos_renyi: return n;
    }
    return 0;
}

std::string GraphFamily::describe() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::grid: out << "grid(" << rows << "," << cols << ")"; break;
        case Kind::complete: out << "complete(" << n << ")"; break;
        case Kind::erdos_renyi: out << "erdos_renyi(" << n << "," << p << ")"; break;
    }
    return out.str();
}

GraphFamily grid_family(int rows, int cols, std::uint64_t seed) {
    GraphFamily family;
    family.kind = GraphFamily::Kind::grid;
    family.rows = rows;
    family.cols = cols;
    family.seed = seed;
    return family;
}

GraphFamily complete_family(int n, std::uint64_t seed) {
    GraphFamily family;
    family.kind = GraphFamily::Kind::complete;
    family.n = n;
    family.seed = seed;
    return family;
}

GraphFamily erdos_renyi_family(int n, double p, std::uint64_t seed) {
    GraphFamily family;
    family.kind = GraphFamily::Kind::erdos_renyi;
    family.n = n;
    family.p = p;
    family.seed = seed;
    return family;
}

namespace {

void validate_family(const GraphFamily& family) {
    switch (family.kind) {
        case GraphFamily::Kind::grid:
            if (family.rows < 1 || family.cols < 1 || family.rows * family.cols < 2)
                throw std::invalid_argument("grid family needs at least 2 nodes");
            break;
        case GraphFamily::Kind::complete:
            if (family.n < 2) throw std::invalid_argument("complete family needs n >= 2");
            break;
        case GraphFamily::Kind::erdos_renyi:
            if (family.n < 2) throw std::invalid_argument("erdos_renyi family needs n >= 2");
            if (!(family.p >= 0.0 && family.p <= 1.0))
                throw std::invalid_argument("edge probability must lie in [0, 1]");
            break;
    }
    if (!(family.coupling_range.first < family.coupling_range.second))
        throw std::invalid_argument("degenerate coupling range");
    if (!(family.field_range.first < family.field_range.second))
        throw std::invalid_argument("degenerate field range");
}

} // namespace

Model build_model(const GraphFamily& family, double beta) {
    validate_family(family);
    SplitMix64 rng(family.seed);

    std::vector<Edge> topology;
    switch (family.kind) {
        case GraphFamily::Kind::grid: topology = grid_edges(family.rows, family.cols); break;
        case GraphFamily::Kind::complete: topology = complete_edges(family.n); break;
        case GraphFamily::Kind::erdos_renyi: {
            // Pairs visited in lexicographic order; one uniform draw per pair.
            for (int i = 0; i < family.n; ++i)
                for (int j = i + 1; j < family.n; ++j)
                    if (rng.uniform() < family.p) topology.push_back({i, j});
            break;
        }
    }

    const int n = family.node_count();
    std::vector<std::tuple<int, int, double>> coupled;
    coupled.reserve(topology.size());
    for (const Edge& e : topology)
        coupled.emplace_back(e.i, e.j,
                             rng.uniform(family.coupling_range.first, family.coupling_range.second));
    std::vector<double> fields(n);
    for (int i = 0; i < n; ++i)
        fields[i] = rng.uniform(family.field_range.first, family.field_range.second);

    return make_model(n, coupled, fields, beta);
}

std::string model_to_json(const Model& model) {
    nlohmann::json j;
    j["nodes"] = model.node_count;
    j["beta"] = model.beta;
    auto edges = nlohmann::json::array();
    for (int e = 0; e < model.edge_count(); ++e)
        edges.push_back({model.edges[e].i, model.edges[e].j, model.couplings[e]});
    j["edges"] = std::move(edges);
    j["fields"] = model.fields;
    return j.dump(2);
}

Model model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed model JSON: ") + e.what());
    }
    try {
        const int n = j.at("nodes").get<int>();
        const double beta = j.at("beta").get<double>();
        std::vector<std::tuple<int, int, double>> coupled;
        for (const auto& entry : j.at("edges")) {
            if (!entry.is_array() || entry.size() != 3)
                throw std::invalid_argument("edge entries must be [i, j, J] triples");
            coupled.emplace_back(entry[0].get<int>(), entry[1].get<int>(), entry[2].get<double>());
        }
        const auto fields = j.at("fields").get<std::vector<double>>();
        return make_model(n, coupled, fields, beta);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed model JSON: ") + e.what());
    }
}

void save_model(const Model& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << model_to_json(model) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return model_from_json(buffer.str());
}

} // namespace bethe
