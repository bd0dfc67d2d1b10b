#include "bethe/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "bethe/free_energy.hpp"

namespace bethe {

double partition_error(const ExactSolution& exact, double f_bethe_min, double beta) {
    const double log_z_bethe = -beta * f_bethe_min;
    return std::fabs(log_z_bethe - exact.log_z);
}

double singleton_error(const ExactSolution& exact, const std::vector<double>& q) {
    if (exact.singleton.size() != q.size())
        throw std::invalid_argument("singleton length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) sum += std::fabs(exact.singleton[i] - q[i]);
    return 2.0 * sum / static_cast<double>(q.size());
}

double pairwise_error(const ExactSolution& exact, const Model& model,
                      const std::vector<double>& q) {
    if (static_cast<int>(exact.pairwise.size()) != model.edge_count())
        throw std::invalid_argument("pairwise table count mismatch");
    if (model.edge_count() == 0) return 0.0;
    const auto tables = pairwise_marginals_from_q(model, q);
    double sum = 0.0;
    for (int e = 0; e < model.edge_count(); ++e)
        for (int k = 0; k < 4; ++k) sum += std::fabs(exact.pairwise[e][k] - tables[e][k]);
    return sum / static_cast<double>(model.edge_count());
}

ErrorRecord error_record(const ExactSolution& exact, const Model& model,
                         const std::vector<double>& q, double f_bethe_min) {
    ErrorRecord record;
    record.partition_error = partition_error(exact, f_bethe_min, model.beta);
    record.singleton_error = singleton_error(exact, q);
    record.pairwise_error = pairwise_error(exact, model, q);
    return record;
}

} // namespace bethe
