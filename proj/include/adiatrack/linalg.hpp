#pragma once

#include <cstddef>
#include <vector>

namespace adiatrack::linalg {

/// Solves A x = b for dense row-major n x n A by Gaussian elimination with
/// partial pivoting. Throws NumericalError when a pivot falls below pivot_tol
/// times the largest entry of A.
std::vector<double> solve(std::vector<double> a, std::vector<double> b, std::size_t n,
                          double pivot_tol = 1e-13);

double sup_norm(const std::vector<double>& v);
double sup_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace adiatrack::linalg
