#pragma once

#include <vector>

#include "bethe/model.hpp"

namespace bethe {

// The Bethe box is the open cube (0,1)^N; all operations clamp incoming
// components to [kEpsBox, 1 - kEpsBox] so the entropy logs stay finite.
inline constexpr double kEpsBox = 1e-9;

double clamp_unit(double q);
std::vector<double> clamp_to_box(std::vector<double> q);
bool inside_box(const std::vector<double>& q);

// Logistic sigmoid 1 / (1 + e^{-x}).
double sigmoid(double x);

// alpha_ij = e^{4 beta J} - 1. Strictly > -1; sign matches sign of J.
double edge_alpha(double beta, double coupling);

// Stationary pairwise pseudo-marginal xi*(q_i, q_j): the root of
//   (1 + alpha (q_i + q_j)) xi = alpha xi^2 + (1 + alpha) q_i q_j
// inside the local polytope bounds max(0, q_i+q_j-1) < xi < min(q_i, q_j).
// Evaluated through the conjugate form of the quadratic root (and a series
// continuation for |alpha| < 1e-8) to avoid cancellation near alpha = 0.
double xi_star(double q_i, double q_j, double alpha);

// T_ij = q_i q_j (1-q_i)(1-q_j) - (xi - q_i q_j)^2, strictly positive for a
// consistent (q_i, q_j, xi) triple. Throws std::domain_error otherwise.
double t_ij(double q_i, double q_j, double xi);

struct XiDerivatives {
    double d_qi;      // d xi / d q_i
    double d_qj;      // d xi / d q_j
    double d_qi_qi;   // d^2 xi / d q_i^2
    double d_qi_qj;   // d^2 xi / d q_i d q_j
    double d_qj_qj;   // d^2 xi / d q_j^2
};

// Analytic first and second partial derivatives of xi*, via the implicit
// quadratic with A = 1 + alpha (q_i + q_j - 2 xi).
XiDerivatives xi_derivatives(double q_i, double q_j, double alpha);

// Per-edge derived quantities at a given point of the Bethe box.
struct EdgeAux {
    double alpha;
    double Q;  // 1 + alpha (q_i + q_j)
    double xi;
    double T;
};

std::vector<EdgeAux> edge_aux(const Model& model, const std::vector<double>& q);

} // namespace bethe
