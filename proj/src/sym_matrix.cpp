#include "bethe/sym_matrix.hpp"

#include <cmath>

namespace bethe {

bool cholesky_positive_definite(const SymMatrix& m) {
    const int n = m.n;
    std::vector<double> l(static_cast<std::size_t>(n) * n, 0.0);
    auto L = [&](int r, int c) -> double& { return l[static_cast<std::size_t>(r) * n + c]; };

    for (int j = 0; j < n; ++j) {
        double diag = m.at(j, j);
        for (int k = 0; k < j; ++k) diag -= L(j, k) * L(j, k);
        if (!(diag > 0.0) || !std::isfinite(diag)) return false;
        const double root = std::sqrt(diag);
        L(j, j) = root;
        for (int i = j + 1; i < n; ++i) {
            double sum = m.at(i, j);
            for (int k = 0; k < j; ++k) sum -= L(i, k) * L(j, k);
            L(i, j) = sum / root;
        }
    }
    return true;
}

} // namespace bethe
