#pragma once

#include <cstddef>
#include <vector>

namespace bethe {

// Dense symmetric matrix; small N, row-major storage.
struct SymMatrix {
    int n = 0;
    std::vector<double> a;

    SymMatrix() = default;
    explicit SymMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}

    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * n + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * n + c]; }
};

// Attempts a Cholesky factorization; true iff the matrix is numerically
// positive definite (every pivot > 0 and finite).
bool cholesky_positive_definite(const SymMatrix& m);

} // namespace bethe
