#pragma once

#include <array>
#include <vector>

#include "bethe/edge_terms.hpp"
#include "bethe/model.hpp"
#include "bethe/sym_matrix.hpp"

namespace bethe {

// Bethe free energy restricted to the Bethe box, i.e. with every pairwise
// pseudo-marginal replaced by xi*(q_i, q_j):
//   F_B(q) = U_B(q) - (1/beta) S_B(q)
//   U_B    = -sum_e (1 + 2 (2 xi - q_i - q_j)) J_e + sum_i (1 - 2 q_i) theta_i
//   S_B    = sum_e S_ij - sum_i (d_i - 1) S_i
double bethe_free_energy(const Model& model, const std::vector<double>& q);

// Analytic gradient: component i is
//   -2 theta_i + 2 sum_{j in N(i)} J_ij
//   + (1/beta) [ (d_i - 1) log((1-q_i)/q_i)
//                + sum_{j in N(i)} log((q_i - xi_ij) / (1 + xi_ij - q_i - q_j)) ].
std::vector<double> bethe_gradient(const Model& model, const std::vector<double>& q);

// Hessian of F_B on the Bethe box. Sparsity pattern equals the graph
// adjacency plus the diagonal; values do not depend on the fields theta.
//   diag:     (1/beta) ( -(d_i-1)/(q_i(1-q_i)) + sum_j q_j(1-q_j)/T_ij )
//   off-diag: (1/beta) (q_i q_j - xi_ij) / T_ij on edges, zero elsewhere.
SymMatrix bethe_hessian(const Model& model, const std::vector<double>& q);

// Pairwise 2x2 pseudo-marginal table per edge, row-major over
// (x_i, x_j) in {(+,+), (+,-), (-,+), (-,-)}:
//   (xi, q_i - xi, q_j - xi, 1 + xi - q_i - q_j).
std::vector<std::array<double, 4>> pairwise_marginals_from_q(const Model& model,
                                                             const std::vector<double>& q);

} // namespace bethe
