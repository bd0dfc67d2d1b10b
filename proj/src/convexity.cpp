#include "bethe/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "bethe/edge_terms.hpp"
#include "bethe/free_energy.hpp"

namespace bethe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCoefGuard = 1e-12; // relative perturbation guard for Sturm chains

using Poly = std::vector<double>; // ascending coefficients

double max_abs(const Poly& p) {
    double m = 0.0;
    for (double c : p) m = std::max(m, std::fabs(c));
    return m;
}

// Drops leading (highest-order) coefficients that are negligible relative to
// the polynomial's own scale.
Poly trim(Poly p, double rel = kCoefGuard) {
    const double scale = max_abs(p);
    while (p.size() > 1 && std::fabs(p.back()) <= rel * scale) p.pop_back();
    if (p.empty()) p.push_back(0.0);
    return p;
}

double eval(const Poly& p, double x) {
    double v = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) v = v * x + p[k];
    return v;
}

Poly derivative(const Poly& p) {
    if (p.size() <= 1) return {0.0};
    Poly d(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = p[k] * static_cast<double>(k);
    return d;
}

// Remainder of p divided by q, coefficients normalized afterwards.
Poly remainder(Poly p, const Poly& q) {
    const std::size_t dq = q.size() - 1;
    const double lead = q.back();
    while (p.size() > dq && !(p.size() == 1 && p[0] == 0.0)) {
        const double factor = p.back() / lead;
        const std::size_t shift = p.size() - 1 - dq;
        for (std::size_t k = 0; k < q.size(); ++k) p[shift + k] -= factor * q[k];
        p.pop_back();
        p = trim(std::move(p));
        if (p.size() == 1 && p[0] == 0.0) break;
    }
    return p;
}

bool is_zero(const Poly& p) { return p.size() == 1 && p[0] == 0.0; }

std::vector<Poly> sturm_chain(const Poly& p) {
    std::vector<Poly> chain;
    chain.push_back(trim(p));
    if (chain[0].size() == 1) return chain;
    chain.push_back(trim(derivative(chain[0])));
    while (chain.back().size() > 1) {
        Poly rem = remainder(chain[chain.size() - 2], chain.back());
        for (double& c : rem) c = -c;
        rem = trim(std::move(rem));
        if (is_zero(rem)) break; // non-trivial gcd: repeated root somewhere
        const double scale = max_abs(rem);
        if (scale > 0.0)
            for (double& c : rem) c /= scale;
        chain.push_back(std::move(rem));
    }
    return chain;
}

int sign_of(double v, double tol) { return v > tol ? 1 : (v < -tol ? -1 : 0); }

int sign_changes(const std::vector<Poly>& chain, double x) {
    int changes = 0;
    int prev = 0;
    for (const Poly& p : chain) {
        const int s = sign_of(eval(p, x), kCoefGuard * max_abs(p));
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++changes;
        prev = s;
    }
    return changes;
}

// Number of distinct real roots in (a, b] by Sturm's theorem.
int sturm_roots_in(const Poly& p, double a, double b) {
    const std::vector<Poly> chain = sturm_chain(p);
    return sign_changes(chain, a) - sign_changes(chain, b);
}

// Golden-section minimization of the polynomial on [lo, hi].
double refine_minimum(const Poly& p, double lo, double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = eval(p, x1);
    double f2 = eval(p, x2);
    for (int it = 0; it < 80 && (b - a) > 1e-14; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(p, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(p, x2);
        }
    }
    return std::min(f1, f2);
}

// 4096-point sign sampling on (0, 0.5] with local-minimum refinement.
bool sampling_positive(const Poly& p) {
    constexpr int kSamples = 4096;
    std::vector<double> values(kSamples);
    for (int k = 1; k <= kSamples; ++k) {
        const double x = 0.5 * k / kSamples;
        values[k - 1] = eval(p, x);
        if (values[k - 1] <= 0.0) return false;
    }
    for (int k = 1; k + 1 < kSamples; ++k) {
        if (values[k] <= values[k - 1] && values[k] <= values[k + 1]) {
            const double lo = 0.5 * k / kSamples;
            const double hi = 0.5 * (k + 2) / kSamples;
            if (refine_minimum(p, lo, hi) <= 0.0) return false;
        }
    }
    // The leftmost samples bracket a possible dip toward 0.
    if (refine_minimum(p, 1e-14, 0.5 * 2 / kSamples) <= 0.0) return false;
    return true;
}

std::vector<double> node_alpha_magnitudes(const Model& model, int node, double beta) {
    std::vector<double> alphas;
    alphas.reserve(model.adjacency[node].size());
    for (const auto& [nbr, e] : model.adjacency[node])
        alphas.push_back(edge_alpha(beta, std::fabs(model.couplings[e])));
    return alphas;
}

Poly psi_from_alphas(const std::vector<double>& alphas) {
    const int d = static_cast<int>(alphas.size());
    // prod = Pi_j (1 + a_j q)
    Poly prod{1.0};
    for (double a : alphas) {
        Poly next(prod.size() + 1, 0.0);
        for (std::size_t k = 0; k < prod.size(); ++k) {
            next[k] += prod[k];
            next[k + 1] += prod[k] * a;
        }
        prod = std::move(next);
    }

    Poly psi(prod.size() + 2, 0.0); // degree d + 1 at most
    for (std::size_t k = 0; k < prod.size(); ++k) psi[k] += -(d - 1) * prod[k];

    for (int j = 0; j < d; ++j) {
        Poly part{1.0};
        for (int k = 0; k < d; ++k) {
            if (k == j) continue;
            Poly next(part.size() + 1, 0.0);
            for (std::size_t t = 0; t < part.size(); ++t) {
                next[t] += part[t];
                next[t + 1] += part[t] * alphas[k];
            }
            part = std::move(next);
        }
        // (1 + a_j q^2) * part
        for (std::size_t t = 0; t < part.size(); ++t) {
            psi[t] += part[t];
            psi[t + 2] += alphas[j] * part[t];
        }
    }
    while (psi.size() > 1 && psi.back() == 0.0) psi.pop_back();
    return psi;
}

bool all_psi_positive(const Model& model, double beta) {
    for (int i = 0; i < model.node_count; ++i) {
        PsiPolynomial p;
        p.node = i;
        p.coefficients = psi_from_alphas(node_alpha_magnitudes(model, i, beta));
        if (!psi_positive_on_interval(p)) return false;
    }
    return true;
}

} // namespace

PsiPolynomial psi_polynomial(const Model& model, int node) {
    if (node < 0 || node >= model.node_count)
        throw std::invalid_argument("node index out of range");
    PsiPolynomial p;
    p.node = node;
    p.coefficients = psi_from_alphas(node_alpha_magnitudes(model, node, model.beta));
    return p;
}

bool psi_positive_on_interval(const PsiPolynomial& poly) {
    if (poly.coefficients.empty()) throw std::invalid_argument("empty polynomial");
    const Poly p = trim(poly.coefficients);
    if (p.size() == 1) return p[0] > 0.0;

    const bool sturm_clear = sturm_roots_in(p, 0.0, 0.5) == 0;
    const bool sample_clear = sampling_positive(p);
    // A sufficient certificate must never claim convexity falsely: any
    // disagreement between the two root checks resolves to "not certified".
    return sturm_clear && sample_clear;
}

double critical_beta_diag_dominance(const Model& model, double beta_max) {
    if (!(beta_max > 0.0)) throw std::invalid_argument("beta_max must be positive");
    if (all_psi_positive(model, beta_max)) return kInf;
    double lo = 0.0; // infinite-temperature end: every Psi_i == 1 + O(alpha)
    double hi = beta_max;
    while (hi - lo > kTolBeta) {
        const double mid = 0.5 * (lo + hi);
        if (all_psi_positive(model, mid))
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

double edge_beta_star(int d_i, int d_j, double coupling) {
    if (d_i <= 2 || d_j <= 2) return kInf;
    if (coupling == 0.0) return kInf;
    const double denom = static_cast<double>(d_i) * d_j - d_i - d_j;
    return std::acosh(1.0 + 2.0 / denom) / (2.0 * std::fabs(coupling));
}

double det_h2x2(const Model& model, int edge_index, double q_i, double q_j) {
    if (edge_index < 0 || edge_index >= model.edge_count())
        throw std::invalid_argument("edge index out of range");
    q_i = clamp_unit(q_i);
    q_j = clamp_unit(q_j);
    const Edge& edge = model.edges[edge_index];
    const double d_i = model.degree(edge.i);
    const double d_j = model.degree(edge.j);
    const double alpha = edge_alpha(model.beta, model.couplings[edge_index]);
    const double xi = xi_star(q_i, q_j, alpha);
    const double T = t_ij(q_i, q_j, xi);

    const double c1 = (d_i - 1.0) / d_i * (d_j - 1.0) / d_j;
    const double c2 = 1.0 - (d_i - 1.0) / d_i - (d_j - 1.0) / d_j;
    return c1 / (q_i * q_j * (1.0 - q_i) * (1.0 - q_j)) + c2 / T;
}

std::vector<EdgeHessian> sum_decomposition_hessians(const Model& model,
                                                    const std::vector<double>& q_raw) {
    const std::vector<double> q = clamp_to_box(q_raw);
    const std::vector<EdgeAux> aux = edge_aux(model, q);
    const double inv_beta = 1.0 / model.beta;

    std::vector<EdgeHessian> parts(model.edge_count());
    for (int e = 0; e < model.edge_count(); ++e) {
        const int i = model.edges[e].i;
        const int j = model.edges[e].j;
        const double d_i = model.degree(i);
        const double d_j = model.degree(j);
        EdgeHessian& part = parts[e];
        part.i = i;
        part.j = j;
        part.h_ii = inv_beta * (-(d_i - 1.0) / (d_i * q[i] * (1.0 - q[i])) +
                                q[j] * (1.0 - q[j]) / aux[e].T);
        part.h_jj = inv_beta * (-(d_j - 1.0) / (d_j * q[j] * (1.0 - q[j])) +
                                q[i] * (1.0 - q[i]) / aux[e].T);
        part.h_ij = inv_beta * (q[i] * q[j] - aux[e].xi) / aux[e].T;
    }
    return parts;
}

SymmetricThresholds symmetric_model_thresholds(int d, double coupling) {
    if (d < 3) throw std::invalid_argument("symmetric thresholds require degree >= 3");
    if (coupling == 0.0) throw std::invalid_argument("coupling must be non-zero");
    const double J = std::fabs(coupling);
    SymmetricThresholds t;
    t.exact = std::atanh(1.0 / (d - 1)) / J;
    t.dobrushin = (d % 2 == 1) ? std::atanh(1.0 / d) / J : std::atanh(2.0 / d) / (2.0 * J);
    t.simon = 1.0 / (J * d);
    t.diag_dominance = std::log((d + 1.0) * (d + 1.0) / ((d - 1.0) * (d - 1.0))) / (4.0 * J);
    t.heskes = std::log((d - 1.0) / (d - 2.0)) / (4.0 * J);
    return t;
}

ConvexityReport certify(const Model& model, double beta_max) {
    ConvexityReport report;
    report.per_node_psi_positive.resize(model.node_count);
    report.diag_dominance_convex = true;
    for (int i = 0; i < model.node_count; ++i) {
        const bool ok = psi_positive_on_interval(psi_polynomial(model, i));
        report.per_node_psi_positive[i] = ok;
        report.diag_dominance_convex = report.diag_dominance_convex && ok;
    }

    report.per_edge_beta_star.resize(model.edge_count());
    report.sum_decomposition_convex = true;
    report.beta_star_sum = kInf;
    for (int e = 0; e < model.edge_count(); ++e) {
        const double star = edge_beta_star(model.degree(model.edges[e].i),
                                           model.degree(model.edges[e].j), model.couplings[e]);
        report.per_edge_beta_star[e] = star;
        report.beta_star_sum = std::min(report.beta_star_sum, star);
        if (!(model.beta < star)) report.sum_decomposition_convex = false;
    }

    report.beta_star_diag = critical_beta_diag_dominance(model, beta_max);
    return report;
}

std::string convexity_report_to_json(const ConvexityReport& report, const Model& model) {
    nlohmann::json j;
    j["diag_convex"] = report.diag_dominance_convex;
    j["sum_convex"] = report.sum_decomposition_convex;
    j["beta_star_diag"] =
        std::isfinite(report.beta_star_diag) ? nlohmann::json(report.beta_star_diag) : nullptr;
    j["beta_star_sum"] =
        std::isfinite(report.beta_star_sum) ? nlohmann::json(report.beta_star_sum) : nullptr;
    auto per_edge = nlohmann::json::array();
    for (int e = 0; e < model.edge_count(); ++e) {
        const double star = report.per_edge_beta_star[e];
        per_edge.push_back({{"i", model.edges[e].i},
                            {"j", model.edges[e].j},
                            {"beta_star", std::isfinite(star) ? nlohmann::json(star) : nullptr}});
    }
    j["per_edge"] = std::move(per_edge);
    auto per_node = nlohmann::json::array();
    for (int i = 0; i < model.node_count; ++i)
        per_node.push_back({{"node", i}, {"psi_positive", bool(report.per_node_psi_positive[i])}});
    j["per_node"] = std::move(per_node);
    return j.dump(2);
}

} // namespace bethe
