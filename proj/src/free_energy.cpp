#include "bethe/free_energy.hpp"

#include <cmath>
#include <stdexcept>

namespace bethe {

namespace {

double entry_log(double x) {
    if (!(x > 0.0)) throw std::domain_error("pairwise table entry not positive");
    return std::log(x);
}

double xlogx(double x) {
    if (!(x > 0.0)) throw std::domain_error("entropy argument not positive");
    return x * std::log(x);
}

} // namespace

double bethe_free_energy(const Model& model, const std::vector<double>& q_raw) {
    const std::vector<double> q = clamp_to_box(q_raw);
    const std::vector<EdgeAux> aux = edge_aux(model, q);

    double average_energy = 0.0;
    double pair_entropy = 0.0;
    for (int e = 0; e < model.edge_count(); ++e) {
        const double q_i = q[model.edges[e].i];
        const double q_j = q[model.edges[e].j];
        const double xi = aux[e].xi;
        average_energy += -(1.0 + 2.0 * (2.0 * xi - q_i - q_j)) * model.couplings[e];
        pair_entropy -= xlogx(xi) + xlogx(q_i - xi) + xlogx(q_j - xi) +
                        xlogx(1.0 + xi - q_i - q_j);
    }

    double local_entropy_term = 0.0;
    for (int i = 0; i < model.node_count; ++i) {
        average_energy += (1.0 - 2.0 * q[i]) * model.fields[i];
        const double s_i = -(xlogx(q[i]) + xlogx(1.0 - q[i]));
        local_entropy_term += (model.degree(i) - 1) * s_i;
    }

    const double bethe_entropy = pair_entropy - local_entropy_term;
    return average_energy - bethe_entropy / model.beta;
}

std::vector<double> bethe_gradient(const Model& model, const std::vector<double>& q_raw) {
    const std::vector<double> q = clamp_to_box(q_raw);
    const std::vector<EdgeAux> aux = edge_aux(model, q);
    const double inv_beta = 1.0 / model.beta;

    std::vector<double> grad(model.node_count, 0.0);
    for (int e = 0; e < model.edge_count(); ++e) {
        const int i = model.edges[e].i;
        const int j = model.edges[e].j;
        const double xi = aux[e].xi;
        const double log_joint_mm = entry_log(1.0 + xi - q[i] - q[j]);
        grad[i] += 2.0 * model.couplings[e] + inv_beta * (entry_log(q[i] - xi) - log_joint_mm);
        grad[j] += 2.0 * model.couplings[e] + inv_beta * (entry_log(q[j] - xi) - log_joint_mm);
    }
    for (int i = 0; i < model.node_count; ++i) {
        grad[i] += -2.0 * model.fields[i] +
                   inv_beta * (model.degree(i) - 1) * (std::log1p(-q[i]) - std::log(q[i]));
    }
    return grad;
}

SymMatrix bethe_hessian(const Model& model, const std::vector<double>& q_raw) {
    const std::vector<double> q = clamp_to_box(q_raw);
    const std::vector<EdgeAux> aux = edge_aux(model, q);
    const double inv_beta = 1.0 / model.beta;

    SymMatrix h(model.node_count);
    for (int i = 0; i < model.node_count; ++i)
        h.at(i, i) = -inv_beta * (model.degree(i) - 1) / (q[i] * (1.0 - q[i]));

    for (int e = 0; e < model.edge_count(); ++e) {
        const int i = model.edges[e].i;
        const int j = model.edges[e].j;
        const double T = aux[e].T;
        h.at(i, i) += inv_beta * q[j] * (1.0 - q[j]) / T;
        h.at(j, j) += inv_beta * q[i] * (1.0 - q[i]) / T;
        const double off = inv_beta * (q[i] * q[j] - aux[e].xi) / T;
        h.at(i, j) = off;
        h.at(j, i) = off;
    }
    return h;
}

std::vector<std::array<double, 4>> pairwise_marginals_from_q(const Model& model,
                                                             const std::vector<double>& q_raw) {
    const std::vector<double> q = clamp_to_box(q_raw);
    const std::vector<EdgeAux> aux = edge_aux(model, q);

    std::vector<std::array<double, 4>> tables(model.edge_count());
    for (int e = 0; e < model.edge_count(); ++e) {
        const double q_i = q[model.edges[e].i];
        const double q_j = q[model.edges[e].j];
        const double xi = aux[e].xi;
        tables[e] = {xi, q_i - xi, q_j - xi, 1.0 + xi - q_i - q_j};
    }
    return tables;
}

} // namespace bethe
