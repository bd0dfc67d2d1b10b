#include "bethe/edge_terms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bethe {

double clamp_unit(double q) { return std::min(1.0 - kEpsBox, std::max(kEpsBox, q)); }

std::vector<double> clamp_to_box(std::vector<double> q) {
    for (double& v : q) v = clamp_unit(v);
    return q;
}

bool inside_box(const std::vector<double>& q) {
    for (double v : q)
        if (!(v >= kEpsBox && v <= 1.0 - kEpsBox)) return false;
    return true;
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double edge_alpha(double beta, double coupling) {
    const double alpha = std::expm1(4.0 * beta * coupling);
    if (!std::isfinite(alpha))
        throw std::domain_error("edge_alpha overflow: beta * J too large");
    return alpha;
}

double xi_star(double q_i, double q_j, double alpha) {
    q_i = clamp_unit(q_i);
    q_j = clamp_unit(q_j);
    if (!(alpha > -1.0)) throw std::domain_error("alpha must exceed -1");

    const double product = q_i * q_j;
    // Series continuation: xi = q_i q_j + alpha q_i q_j (1-q_i)(1-q_j) + O(alpha^2).
    if (std::fabs(alpha) < 1e-8)
        return product * (1.0 + alpha * (1.0 - q_i) * (1.0 - q_j));

    const double Q = 1.0 + alpha * (q_i + q_j);
    double disc = Q * Q - 4.0 * alpha * (1.0 + alpha) * product;
    if (disc < 0.0) disc = 0.0; // roundoff guard; analytically > 0
    const double root = std::sqrt(disc);

    double xi;
    if (Q > 0.0) {
        // Conjugate form avoids Q - sqrt cancellation for alpha > 0.
        xi = 2.0 * (1.0 + alpha) * product / (Q + root);
    } else {
        // Q <= 0 only for alpha < 0; numerator terms then share a sign.
        xi = (Q - root) / (2.0 * alpha);
    }

    // Keep strictly inside the polytope bounds. The margin must stay above
    // the floating-point spacing near the bounds, or a clamped xi can land
    // exactly on min(q_i, q_j) (or the lower bound) and zero out a table
    // entry when q sits in a corner of the box.
    const double lo = std::max(0.0, q_i + q_j - 1.0);
    const double hi = std::min(q_i, q_j);
    const double margin = std::max(0x1.0p-60 * (hi - lo), 2e-15);
    if (hi - lo <= 2.0 * margin) return 0.5 * (lo + hi);
    return std::min(hi - margin, std::max(lo + margin, xi));
}

double t_ij(double q_i, double q_j, double xi) {
    q_i = clamp_unit(q_i);
    q_j = clamp_unit(q_j);
    const double centered = xi - q_i * q_j;
    const double value = q_i * q_j * (1.0 - q_i) * (1.0 - q_j) - centered * centered;
    if (!(value > 0.0))
        throw std::domain_error("T_ij must be positive; inconsistent (q_i, q_j, xi)");
    return value;
}

XiDerivatives xi_derivatives(double q_i, double q_j, double alpha) {
    q_i = clamp_unit(q_i);
    q_j = clamp_unit(q_j);
    const double xi = xi_star(q_i, q_j, alpha);
    const double A = 1.0 + alpha * (q_i + q_j - 2.0 * xi);
    const double num_i = alpha * (q_j - xi) + q_j; // d/dq_i numerator
    const double num_j = alpha * (q_i - xi) + q_i; // d/dq_j numerator

    XiDerivatives d{};
    d.d_qi = num_i / A;
    d.d_qj = num_j / A;
    const double A2 = A * A;
    d.d_qi_qi = alpha * (-d.d_qi * A - num_i * (1.0 - 2.0 * d.d_qi)) / A2;
    d.d_qj_qj = alpha * (-d.d_qj * A - num_j * (1.0 - 2.0 * d.d_qj)) / A2;
    // Mixed derivative written with alpha multiplied through so it stays
    // finite as alpha -> 0 (limit 1/A).
    d.d_qi_qj = ((alpha * (1.0 - d.d_qj) + 1.0) * A - alpha * num_i * (1.0 - 2.0 * d.d_qj)) / A2;
    return d;
}

std::vector<EdgeAux> edge_aux(const Model& model, const std::vector<double>& q) {
    std::vector<EdgeAux> aux(model.edge_count());
    for (int e = 0; e < model.edge_count(); ++e) {
        const double q_i = clamp_unit(q[model.edges[e].i]);
        const double q_j = clamp_unit(q[model.edges[e].j]);
        EdgeAux& a = aux[e];
        a.alpha = edge_alpha(model.beta, model.couplings[e]);
        a.Q = 1.0 + a.alpha * (q_i + q_j);
        a.xi = xi_star(q_i, q_j, a.alpha);
        a.T = t_ij(q_i, q_j, a.xi);
    }
    return aux;
}

} // namespace bethe
