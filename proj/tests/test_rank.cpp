#include <doctest.h>

#include <vector>

#include "lfsrprune/random.hpp"
#include "lfsrprune/rank.hpp"

using namespace lfsrprune;

namespace {

// rows x k times k x cols: rank k by construction (with probability one).
std::vector<double> low_rank(std::size_t rows, std::size_t cols, std::size_t k, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> a(rows * k), b(k * cols), m(rows * cols, 0.0);
    for (double& v : a) v = rng.normal();
    for (double& v : b) v = rng.normal();
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            for (std::size_t t = 0; t < k; ++t) m[i * cols + j] += a[i * k + t] * b[t * cols + j];
    return m;
}

}  // namespace

TEST_CASE("small matrices with known rank") {
    CHECK(numerical_rank(std::vector<double>{1, 0, 0, 1}, 2, 2) == 2);
    CHECK(numerical_rank(std::vector<double>{1, 2, 2, 4}, 2, 2) == 1);
    CHECK(numerical_rank(std::vector<double>{0, 0, 0, 0, 0, 0}, 2, 3) == 0);
    CHECK(numerical_rank(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9}, 3, 3) == 2);
    CHECK(numerical_rank(std::vector<double>{0, 1, 1, 0}, 2, 2) == 2);  // needs a row swap
}

TEST_CASE("rank of product matrices equals the inner dimension") {
    for (std::size_t k : {1u, 3u, 7u, 10u}) {
        CHECK(numerical_rank(low_rank(20, 12, k, k), 20, 12) == k);
        CHECK(numerical_rank(low_rank(12, 20, k, k + 100), 12, 20) == k);
    }
}

TEST_CASE("gaussian matrices have full rank") {
    Rng rng(5);
    std::vector<double> m(120 * 84);
    for (double& v : m) v = rng.normal();
    CHECK(numerical_rank(m, 120, 84) == 84);
    CHECK(numerical_rank(m, 84, 120) == 84);
}

TEST_CASE("tiny perturbations below the tolerance do not add rank") {
    std::vector<double> m = {1, 2, 2, 4 + 1e-14};
    CHECK(numerical_rank(m, 2, 2) == 1);
    CHECK(numerical_rank(m, 2, 2, 1e-16) == 2);
}
