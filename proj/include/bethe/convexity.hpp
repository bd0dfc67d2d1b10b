#pragma once

#include <string>
#include <vector>

#include "bethe/model.hpp"

namespace bethe {

// Node polynomial of the diagonal-dominance certificate,
//   Psi_i(q) = -(d_i - 1) prod_j (1 + a_j q) + sum_j (1 + a_j q^2) prod_{k != j} (1 + a_k q),
// with a_j = e^{4 beta |J_ij|} - 1 (coupling strengths enter, signs do not).
// F_B is convex on the Bethe box if every Psi_i is strictly positive on (0, 0.5].
struct PsiPolynomial {
    int node = 0;
    std::vector<double> coefficients; // ascending powers, degree <= d_i + 1
};

PsiPolynomial psi_polynomial(const Model& model, int node);

// True iff Psi has no root in (0, 0.5]. Combines Sturm-sequence root counting
// (with a coefficient perturbation guard) and 4096-point sign sampling with
// local minimum refinement; any disagreement resolves to "not certified".
bool psi_positive_on_interval(const PsiPolynomial& poly);

// Smallest beta in (0, beta_max] at which some Psi_i acquires a root in
// (0, 0.5], located by bisection to kTolBeta. Returns +infinity when the
// certificate holds on the whole bracket.
double critical_beta_diag_dominance(const Model& model, double beta_max);

inline constexpr double kTolBeta = 1e-4;
inline constexpr double kDefaultBetaMax = 5.0;

// Per-edge critical inverse temperature of the sum-decomposition certificate:
//   (1 / (2|J|)) arccosh(1 + 2 / (d_i d_j - d_i - d_j))   for d_i, d_j > 2,
// and +infinity otherwise (the certificate places no constraint on edges with
// an end of degree <= 2), likewise +infinity for J = 0.
double edge_beta_star(int d_i, int d_j, double coupling);

// Determinant of the 2x2 edge-specific sub-Hessian under s_ij = 1/d_i, with
// the 1/beta^2 scale factor omitted:
//   ((d_i-1)/d_i)((d_j-1)/d_j) / (q_i q_j (1-q_i)(1-q_j))
//   + (1/T_ij) (1 - (d_i-1)/d_i - (d_j-1)/d_j).
double det_h2x2(const Model& model, int edge_index, double q_i, double q_j);

// Edge-specific Hessians H^(i,j) with the uniform allocation s_ij = 1/d_i.
// Each has exactly four non-zero entries; they sum to bethe_hessian(model, q).
struct EdgeHessian {
    int i = 0, j = 0;
    double h_ii = 0.0, h_jj = 0.0, h_ij = 0.0;
};

std::vector<EdgeHessian> sum_decomposition_hessians(const Model& model,
                                                    const std::vector<double>& q);

// Critical inverse temperature estimates for the complete graph with uniform
// coupling J, vanishing fields and uniform degree d >= 3.
struct SymmetricThresholds {
    double exact;           // (1/|J|) arctanh(1/(d-1))
    double dobrushin;       // odd d: (1/|J|) arctanh(1/d); even d: (1/(2|J|)) arctanh(2/d)
    double simon;           // 1 / (|J| d)
    double diag_dominance;  // (1/(4|J|)) log((d+1)^2 / (d-1)^2)
    double heskes;          // (1/(4|J|)) log((d-1) / (d-2))
};

SymmetricThresholds symmetric_model_thresholds(int d, double coupling);

// Aggregated convexity verdicts. Both certificates are sufficient only: the
// report never asserts non-convexity, merely "not certified".
struct ConvexityReport {
    std::vector<bool> per_node_psi_positive;  // per node
    bool diag_dominance_convex = false;       // AND over nodes
    std::vector<double> per_edge_beta_star;   // aligned with model.edges
    bool sum_decomposition_convex = false;    // beta < beta*_e for all constrained edges
    double beta_star_diag = 0.0;              // +infinity when none <= beta_max
    double beta_star_sum = 0.0;               // min over edges, +infinity when unconstrained
};

ConvexityReport certify(const Model& model, double beta_max = kDefaultBetaMax);

// {"diag_convex": b, "sum_convex": b, "beta_star_diag": x|null,
//  "beta_star_sum": x|null, "per_edge": [...], "per_node": [...]}
std::string convexity_report_to_json(const ConvexityReport& report, const Model& model);

} // namespace bethe
