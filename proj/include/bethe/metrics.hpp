#pragma once

#include <vector>

#include "bethe/exact.hpp"
#include "bethe/model.hpp"

namespace bethe {

struct ErrorRecord {
    double partition_error = 0.0; // | -log Z + log Z_B |
    double singleton_error = 0.0; // (2/N) sum_i |p_i(+1) - q_i|
    double pairwise_error = 0.0;  // (1/|E|) sum_e l1 distance of the 2x2 tables
};

// log Z_B is defined by -(1/beta) log Z_B = min F_B, i.e. log Z_B = -beta f.
double partition_error(const ExactSolution& exact, double f_bethe_min, double beta);

double singleton_error(const ExactSolution& exact, const std::vector<double>& q);

// Compares the exact pairwise tables against the Table-1 reconstruction from q.
double pairwise_error(const ExactSolution& exact, const Model& model,
                      const std::vector<double>& q);

ErrorRecord error_record(const ExactSolution& exact, const Model& model,
                         const std::vector<double>& q, double f_bethe_min);

} // namespace bethe
