#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "lfsrprune/error.hpp"
#include "lfsrprune/mask.hpp"
#include "oracles/lfsr_oracle.hpp"

using namespace lfsrprune;

namespace {

// Independent replay: bit-array registers, a std::set for duplicates.
std::vector<Position> oracle_mask(std::uint32_t rows, std::uint32_t cols, std::size_t kept, unsigned wr,
                                  std::vector<unsigned> tr, std::uint32_t sr, unsigned wc, std::vector<unsigned> tc,
                                  std::uint32_t sc) {
    oracle::BitwiseLfsr r(wr, std::move(tr), sr), c(wc, std::move(tc), sc);
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    std::vector<Position> out;
    while (out.size() < kept) {
        const auto row = static_cast<std::uint32_t>((std::uint64_t{r.value()} * rows) >> wr);
        const auto col = static_cast<std::uint32_t>((std::uint64_t{c.value()} * cols) >> wc);
        if (seen.insert({row, col}).second) out.push_back({row, col});
        r.shift();
        c.shift();
    }
    return out;
}

}  // namespace

TEST_CASE("kept count rounds the dense fraction") {
    CHECK(kept_count_for(10, 10, 0.9) == 10);
    CHECK(kept_count_for(300, 100, 0.7) == 9000);
    CHECK(kept_count_for(3, 3, 0.5) == 5);  // 4.5 rounds up
    CHECK(kept_count_for(4, 4, 0.0) == 16);
}

TEST_CASE("first candidate comes from the seeds") {
    const LfsrSpec r = make_spec(4, {4, 3}, 1);
    const LfsrSpec c = make_spec(5, {5, 3}, 1);
    MaskStream s(16, 32, 3, r, c);
    const auto p = s.next();
    REQUIRE(p);
    CHECK(p->row == map_to_index(1, 16, 4));
    CHECK(p->col == map_to_index(1, 32, 5));
    CHECK(s.steps() == 1);
}

TEST_CASE("mask matches the bitwise set-based oracle") {
    struct Case {
        std::uint32_t rows, cols;
        double sp;
        std::uint32_t seed;
    };
    for (const Case& k : {Case{20, 10, 0.5, 1}, Case{64, 32, 0.9, 7}, Case{13, 50, 0.3, 99}, Case{100, 3, 0.8, 5}}) {
        const auto specs = default_mask_specs(k.rows, k.cols, k.seed);
        const Mask m = generate_mask(k.rows, k.cols, k.sp, specs.first, specs.second);
        const auto expected =
            oracle_mask(k.rows, k.cols, kept_count_for(k.rows, k.cols, k.sp), specs.first.width,
                        specs.first.tap_list(), specs.first.seed, specs.second.width, specs.second.tap_list(),
                        specs.second.seed);
        CHECK(m.kept() == expected);
    }
}

TEST_CASE("mask invariants: distinct, in range, count, flags agree") {
    for (std::uint32_t seed = 1; seed <= 40; ++seed) {
        const std::uint32_t rows = 1 + seed * 7 % 61, cols = 1 + seed * 13 % 47;
        const double sp = (seed % 10) / 10.0;
        const auto specs = default_mask_specs(rows, cols, seed);
        const Mask m = generate_mask(rows, cols, sp, specs.first, specs.second);
        CHECK(m.kept().size() == kept_count_for(rows, cols, sp));
        std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
        for (const Position& p : m.kept()) {
            CHECK(p.row < rows);
            CHECK(p.col < cols);
            CHECK(seen.insert({p.row, p.col}).second);
            CHECK(m.is_kept(p.row, p.col));
        }
        const auto flagged = std::accumulate(m.kept_flags().begin(), m.kept_flags().end(), std::size_t{0});
        CHECK(flagged == m.kept().size());
        CHECK(m.prune_count() == std::size_t{rows} * cols - m.kept().size());
        CHECK(m.steps_consumed() >= m.kept().size());
    }
}

TEST_CASE("same recipe, same mask") {
    const auto specs = default_mask_specs(120, 84, 3);
    CHECK(generate_mask(120, 84, 0.9, specs.first, specs.second) ==
          generate_mask(120, 84, 0.9, specs.first, specs.second));
    const auto other = default_mask_specs(120, 84, 4);
    CHECK_FALSE(generate_mask(120, 84, 0.9, specs.first, specs.second) ==
                generate_mask(120, 84, 0.9, other.first, other.second));
}

TEST_CASE("lower sparsity extends the same stream") {
    const auto specs = default_mask_specs(50, 40, 11);
    const Mask sparse = generate_mask(50, 40, 0.9, specs.first, specs.second);
    const Mask dense = generate_mask(50, 40, 0.5, specs.first, specs.second);
    REQUIRE(dense.kept().size() > sparse.kept().size());
    CHECK(std::equal(sparse.kept().begin(), sparse.kept().end(), dense.kept().begin()));
}

TEST_CASE("a fully dense mask covers every position") {
    const auto specs = default_mask_specs(9, 7, 1);
    const Mask m = generate_mask(9, 7, 0.0, specs.first, specs.second);
    CHECK(m.kept().size() == 63);
    CHECK(m.prune_count() == 0);
}

TEST_CASE("too few register states exhausts the step budget") {
    // Two equal-width 4-bit registers repeat after 15 pairs.
    const LfsrSpec r = make_spec(4, {4, 3}, 1);
    const LfsrSpec c = make_spec(4, {4, 3}, 2);
    CHECK_THROWS_AS(generate_mask(20, 20, 0.5, r, c), ValidationError);
    CHECK_THROWS_AS(generate_mask_count(4, 4, 0, r, c), ValidationError);
}

TEST_CASE("default widths and seeds") {
    CHECK(default_width_for(1) == 4);
    CHECK(default_width_for(10) == 6);
    CHECK(default_width_for(16) == 6);
    CHECK(default_width_for(17) == 7);
    CHECK(default_width_for(784) == 12);

    const auto [r, c] = default_mask_specs(300, 100, 1);
    CHECK(r.width == 11);
    CHECK(std::gcd(r.width, c.width) == 1u);
    CHECK(r.seed == 1);
    CHECK(c.seed == ((1u ^ 0x5A5A5Au) & c.state_mask()));
    CHECK(is_maximal(r.width, r.taps));
    CHECK(is_maximal(c.width, c.taps));

    // Seed bits above the width are dropped; an all-zero truncation becomes 1.
    const auto [r0, c0] = default_mask_specs(10, 10, 64);
    CHECK(r0.width == 6);
    CHECK(r0.seed == 1);
    CHECK(c0.seed != 0);
}

TEST_CASE("default specs always use coprime widths") {
    for (std::uint32_t rows : {1u, 5u, 16u, 84u, 120u, 300u, 784u, 2048u}) {
        for (std::uint32_t cols : {1u, 3u, 10u, 32u, 64u, 100u, 2048u}) {
            const auto [r, c] = default_mask_specs(rows, cols, 1);
            CHECK(std::gcd(r.width, c.width) == 1u);
            CHECK(r.width >= default_width_for(rows));
            CHECK(c.width >= default_width_for(cols));
        }
    }
}

TEST_CASE("mask stats on a known pattern") {
    const auto specs = default_mask_specs(40, 30, 2);
    const Mask m = generate_mask(40, 30, 0.75, specs.first, specs.second);
    const MaskStats st = mask_stats(m);
    CHECK(st.achieved_sparsity == doctest::Approx(0.75));
    CHECK(std::accumulate(st.row_counts.begin(), st.row_counts.end(), 0u) == m.kept().size());
    CHECK(std::accumulate(st.col_counts.begin(), st.col_counts.end(), 0u) == m.kept().size());
    CHECK(st.row_mean == doctest::Approx(300.0 / 40));
    CHECK(st.col_mean == doctest::Approx(10.0));
    CHECK(st.row_min <= st.row_max);
    CHECK(st.steps_per_kept >= 1.0);
    CHECK(st.steps_consumed == m.steps_consumed());
}

TEST_CASE("kept positions spread over every row and column at moderate sparsity") {
    const auto specs = default_mask_specs(120, 84, 1);
    const MaskStats st = mask_stats(generate_mask(120, 84, 0.5, specs.first, specs.second));
    CHECK(st.row_min > 0);
    CHECK(st.col_min > 0);
    CHECK(st.row_cv < 0.5);
    CHECK(st.col_cv < 0.5);
}
