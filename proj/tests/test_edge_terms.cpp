#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "bethe/edge_terms.hpp"
#include "bethe/rng.hpp"
#include "helpers.hpp"

using namespace bethe;
using doctest::Approx;

TEST_CASE("xi_star limits and center value") {
    // alpha -> 0: independence
    CHECK(xi_star(0.3, 0.8, 0.0) == Approx(0.24).epsilon(1e-14));
    CHECK(xi_star(0.5, 0.5, 0.0) == Approx(0.25).epsilon(1e-14));

    // center point at beta J = 1: xi = sigmoid(2) / 2
    const double alpha = edge_alpha(1.0, 1.0);
    CHECK(xi_star(0.5, 0.5, alpha) == Approx(sigmoid(2.0) / 2.0).epsilon(1e-12));

    // series continuation joins the closed form smoothly near alpha = 0
    for (double a : {-3e-8, -1e-8, -1e-9, 1e-9, 1e-8, 3e-8}) {
        const double series_side = xi_star(0.3, 0.7, a);
        CHECK(series_side == Approx(0.21 + a * 0.21 * 0.7 * 0.3).epsilon(1e-10));
    }
}

TEST_CASE("xi_star satisfies the quadratic and the polytope bounds") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 500; ++trial) {
        const double q_i = rng.uniform(0.01, 0.99);
        const double q_j = rng.uniform(0.01, 0.99);
        const double coupling = rng.uniform(-1.0, 1.0);
        const double beta = rng.uniform(0.05, 2.0);
        const double alpha = edge_alpha(beta, coupling);
        const double xi = xi_star(q_i, q_j, alpha);

        // quadratic residual (the defining equation of xi*); the experiment
        // range beta <= 2, |J| <= 1 keeps it within tol_xi = 1e-10, and the
        // moderate-alpha band is at double precision
        const double residual = (1.0 + alpha * (q_i + q_j)) * xi - alpha * xi * xi -
                                (1.0 + alpha) * q_i * q_j;
        CHECK(std::fabs(residual) < 1e-10);
        if (std::fabs(beta * coupling) <= 1.0) CHECK(std::fabs(residual) < 1e-12);

        // local polytope bounds
        CHECK(xi > std::max(0.0, q_i + q_j - 1.0));
        CHECK(xi < std::min(q_i, q_j));

        // sign of the correlation matches the sign of the coupling
        if (coupling > 0.0) CHECK(xi > q_i * q_j);
        if (coupling < 0.0) CHECK(xi < q_i * q_j);

        // exact symmetry in the arguments
        CHECK(xi == xi_star(q_j, q_i, alpha));
    }
}

TEST_CASE("ferro/antiferro reflection of xi_star") {
    SplitMix64 rng(32);
    for (int trial = 0; trial < 200; ++trial) {
        const double q_i = rng.uniform(0.02, 0.98);
        const double q_j = rng.uniform(0.02, 0.98);
        const double beta = rng.uniform(0.1, 2.0);
        const double coupling = rng.uniform(0.05, 1.5);
        const double xi_minus = xi_star(q_i, q_j, edge_alpha(beta, -coupling));
        const double xi_plus = xi_star(q_i, 1.0 - q_j, edge_alpha(beta, coupling));
        CHECK(std::fabs((xi_minus - q_i * q_j) - (-xi_plus + q_i * (1.0 - q_j))) < 1e-10);
    }
}

TEST_CASE("t_ij values") {
    // center point: 1 / (16 cosh^2(beta J))
    for (double bj : {0.2, 0.7, 1.4}) {
        const double xi = xi_star(0.5, 0.5, edge_alpha(1.0, bj));
        CHECK(t_ij(0.5, 0.5, xi) ==
              Approx(1.0 / (16.0 * std::cosh(bj) * std::cosh(bj))).epsilon(1e-12));
    }
    // zero coupling: q_i q_j (1-q_i)(1-q_j)
    CHECK(t_ij(0.3, 0.7, xi_star(0.3, 0.7, 0.0)) == Approx(0.0441).epsilon(1e-13));
    // inconsistent xi outside the feasible disc
    CHECK_THROWS_AS(t_ij(0.5, 0.5, 0.9), std::domain_error);
}

TEST_CASE("xi derivatives match finite differences") {
    SplitMix64 rng(33);
    for (int trial = 0; trial < 200; ++trial) {
        const double q_i = rng.uniform(0.05, 0.95);
        const double q_j = rng.uniform(0.05, 0.95);
        const double alpha = edge_alpha(rng.uniform(0.05, 1.2), rng.uniform(-1.2, 1.5));
        const XiDerivatives d = xi_derivatives(q_i, q_j, alpha);

        auto xi = [&](double a, double b) { return xi_star(a, b, alpha); };
        const double h1 = 1e-6, h2 = 1e-4;
        const double fd_i = (xi(q_i + h1, q_j) - xi(q_i - h1, q_j)) / (2 * h1);
        const double fd_j = (xi(q_i, q_j + h1) - xi(q_i, q_j - h1)) / (2 * h1);
        const double fd_ii = (xi(q_i + h2, q_j) - 2 * xi(q_i, q_j) + xi(q_i - h2, q_j)) / (h2 * h2);
        const double fd_jj = (xi(q_i, q_j + h2) - 2 * xi(q_i, q_j) + xi(q_i, q_j - h2)) / (h2 * h2);
        const double fd_ij = (xi(q_i + h2, q_j + h2) - xi(q_i + h2, q_j - h2) -
                              xi(q_i - h2, q_j + h2) + xi(q_i - h2, q_j - h2)) /
                             (4 * h2 * h2);

        CHECK(std::fabs(d.d_qi - fd_i) <= 1e-5 * std::max(1.0, std::fabs(fd_i)));
        CHECK(std::fabs(d.d_qj - fd_j) <= 1e-5 * std::max(1.0, std::fabs(fd_j)));
        CHECK(std::fabs(d.d_qi_qi - fd_ii) <= 1e-5 * std::max(1.0, std::fabs(fd_ii)));
        CHECK(std::fabs(d.d_qj_qj - fd_jj) <= 1e-5 * std::max(1.0, std::fabs(fd_jj)));
        CHECK(std::fabs(d.d_qi_qj - fd_ij) <= 1e-5 * std::max(1.0, std::fabs(fd_ij)));
    }
}

TEST_CASE("xi derivatives at the center point") {
    for (double bj : {0.3, 0.8, 1.5}) {
        const XiDerivatives d = xi_derivatives(0.5, 0.5, edge_alpha(1.0, bj));
        CHECK(d.d_qi == Approx(0.5).epsilon(1e-12));
        CHECK(d.d_qj == Approx(0.5).epsilon(1e-12));
        CHECK(d.d_qi_qi == Approx(-std::sinh(2 * bj)).epsilon(1e-10));
        CHECK(d.d_qj_qj == Approx(-std::sinh(2 * bj)).epsilon(1e-10));
        CHECK(d.d_qi_qj == Approx(std::cosh(2 * bj)).epsilon(1e-10));
    }
}

TEST_CASE("edge_aux carries consistent per-edge quantities") {
    Model m = test_helpers::random_model(8, 0.5, -1.0, 1.0, 0.9, 71);
    SplitMix64 rng(72);
    const std::vector<double> q = test_helpers::random_interior(m.node_count, rng);
    const auto aux = edge_aux(m, q);
    REQUIRE(static_cast<int>(aux.size()) == m.edge_count());
    for (int e = 0; e < m.edge_count(); ++e) {
        CHECK(aux[e].alpha == edge_alpha(m.beta, m.couplings[e]));
        CHECK(aux[e].T > 0.0);
        const double q_i = q[m.edges[e].i], q_j = q[m.edges[e].j];
        CHECK(aux[e].Q == Approx(1.0 + aux[e].alpha * (q_i + q_j)));
        CHECK(aux[e].xi == xi_star(q_i, q_j, aux[e].alpha));
    }
}

TEST_CASE("alpha overflow guard") {
    CHECK_THROWS_AS(edge_alpha(100.0, 10.0), std::domain_error);
}
