#pragma once

#include <cstddef>
#include <span>

namespace lfsrprune {

/// Rank of a row-major rows x cols matrix by Gaussian elimination with
/// partial pivoting. A pivot counts when its magnitude exceeds
/// tol * max|a_ij| * max(rows, cols), measured on the input matrix.
std::size_t numerical_rank(std::span<const double> matrix, std::size_t rows, std::size_t cols, double tol = 1e-8);

}  // namespace lfsrprune
