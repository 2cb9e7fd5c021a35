#include "lfsrprune/rank.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "lfsrprune/error.hpp"

namespace lfsrprune {

std::size_t numerical_rank(std::span<const double> matrix, std::size_t rows, std::size_t cols, double tol) {
    if (matrix.size() != rows * cols) throw ValidationError("numerical_rank: size does not match shape");
    std::vector<double> a(matrix.begin(), matrix.end());
    double max_entry = 0.0;
    for (double v : a) {
        if (!std::isfinite(v)) throw ValidationError("numerical_rank: non-finite entry");
        max_entry = std::max(max_entry, std::abs(v));
    }
    if (max_entry == 0.0) return 0;
    const double threshold = tol * max_entry * static_cast<double>(std::max(rows, cols));

    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t pivot = rank;
        for (std::size_t r = rank + 1; r < rows; ++r) {
            if (std::abs(a[r * cols + col]) > std::abs(a[pivot * cols + col])) pivot = r;
        }
        if (std::abs(a[pivot * cols + col]) <= threshold) continue;
        if (pivot != rank) {
            std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(pivot * cols),
                             a.begin() + static_cast<std::ptrdiff_t>((pivot + 1) * cols),
                             a.begin() + static_cast<std::ptrdiff_t>(rank * cols));
        }
        const double p = a[rank * cols + col];
        for (std::size_t r = rank + 1; r < rows; ++r) {
            const double f = a[r * cols + col] / p;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < cols; ++c) a[r * cols + c] -= f * a[rank * cols + c];
        }
        ++rank;
    }
    return rank;
}

}  // namespace lfsrprune
