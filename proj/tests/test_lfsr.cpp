#include <doctest.h>

#include <algorithm>
#include <set>

#include "lfsrprune/error.hpp"
#include "lfsrprune/lfsr.hpp"
#include "oracles/lfsr_oracle.hpp"

using namespace lfsrprune;

namespace {

const LfsrSpec kSpec4 = make_spec(4, {4, 3}, 0b0001);

std::string error_of(const LfsrSpec& spec) {
    try {
        validate_spec(spec);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("width-4 register returns to its seed after 15 distinct states") {
    LfsrState s = initial_state(kSpec4);
    std::set<std::uint32_t> seen;
    for (int i = 0; i < 15; ++i) {
        s = step(s, kSpec4);
        seen.insert(s.current);
    }
    CHECK(s.current == 0b0001);
    CHECK(s.steps_taken == 15);
    CHECK(seen.size() == 15);
}

TEST_CASE("width-4 visit order is frozen") {
    // Frozen from the bit-array oracle (and an independent Python run).
    const std::vector<std::uint32_t> expected = {8, 4, 2, 9, 12, 6, 11, 5, 10, 13, 14, 15, 7, 3, 1};
    CHECK(oracle::visit_order(4, {4, 3}, 1, 15) == expected);

    LfsrState s = initial_state(kSpec4);
    std::vector<std::uint32_t> got;
    for (int i = 0; i < 15; ++i) got.push_back((s = step(s, kSpec4)).current);
    CHECK(got == expected);
}

TEST_CASE("step composes and matches the stateful register") {
    for (unsigned w = kMinLfsrWidth; w <= 12; ++w) {
        const LfsrSpec spec = default_spec(w, 0x5u);
        Lfsr reg(spec);
        LfsrState s = initial_state(spec);
        for (int i = 0; i < 200; ++i) {
            const LfsrState two = step(step(s, spec), spec);
            s = step(s, spec);
            CHECK(reg.next() == s.current);
            CHECK(step(s, spec) == two);
        }
    }
}

TEST_CASE("stateful register agrees with the bitwise oracle on long runs") {
    for (unsigned w : {5u, 9u, 13u, 16u, 21u}) {
        const LfsrSpec spec = default_spec(w, 0x1234u & ((1u << w) - 1u));
        oracle::BitwiseLfsr ref(w, spec.tap_list(), spec.seed);
        Lfsr reg(spec);
        for (int i = 0; i < 5000; ++i) {
            ref.shift();
            REQUIRE(reg.next() == ref.value());
        }
    }
}

TEST_CASE("zero state is a lockup error") {
    CHECK_THROWS_AS(step({0, 0}, kSpec4), ValidationError);
}

TEST_CASE("period") {
    CHECK(period(kSpec4) == 15);
    const LfsrSpec weak = make_spec(4, {4, 2}, 1);
    // x^4 + x^2 + 1 = (x^2 + x + 1)^2; brute force gives 6.
    CHECK(period(weak) == 6);
    CHECK(period(weak) < 15);
    CHECK_THROWS_AS(period(make_spec(1, {1}, 1)), ValidationError);
}

TEST_CASE("validate_spec reports the failing invariant") {
    CHECK(validate_spec(kSpec4) == kSpec4);
    CHECK(error_of(make_spec(4, {4, 3}, 0)) == "zero seed");
    CHECK(error_of(make_spec(4, {4, 2}, 1)).starts_with("non-maximal period"));
    CHECK(error_of(make_spec(3, {3, 2}, 1)).starts_with("width out of range"));
    CHECK(error_of(make_spec(25, {25, 22}, 1)).starts_with("width out of range"));
    CHECK(error_of(make_spec(4, {4, 3}, 16)) == "seed exceeds width");
    CHECK(error_of(make_spec(4, {3}, 1)).starts_with("malformed taps"));
    CHECK(error_of(make_spec(4, {5, 4, 3}, 1)).starts_with("malformed taps"));
}

TEST_CASE("every shipped tap set is maximal, checked two independent ways") {
    for (unsigned w = kMinLfsrWidth; w <= kMaxLfsrWidth; ++w) {
        const LfsrSpec spec = default_spec(w, 1);
        CAPTURE(w);
        CHECK_NOTHROW(validate_spec(spec));
        CHECK(period(spec) == (std::uint64_t{1} << w) - 1);
        if (w <= 20) CHECK(oracle::polynomial_order(w, spec.tap_list()) == (std::uint64_t{1} << w) - 1);
    }
}

TEST_CASE("maximal registers visit every nonzero state once per period") {
    for (unsigned w = kMinLfsrWidth; w <= 16; ++w) {
        const LfsrSpec spec = default_spec(w, 1);
        const std::uint32_t n = (1u << w) - 1;
        std::vector<char> seen(n + 1, 0);
        Lfsr reg(spec);
        for (std::uint32_t i = 0; i < n; ++i) {
            const std::uint32_t v = reg.next();
            REQUIRE(v != 0);
            REQUIRE(seen[v] == 0);
            seen[v] = 1;
        }
        CHECK(reg.state() == spec.seed);
    }
}

TEST_CASE("step is a bijection on nonzero states") {
    for (unsigned w = kMinLfsrWidth; w <= 12; ++w) {
        const std::uint32_t taps = default_taps(w);
        std::vector<char> hit(std::size_t{1} << w, 0);
        for (std::uint32_t s = 1; s < (1u << w); ++s) {
            const std::uint32_t next = step({s, 0}, {w, taps, 1}).current;
            REQUIRE(next != 0);
            REQUIRE(hit[next] == 0);
            hit[next] = 1;
        }
    }
}

TEST_CASE("map_to_index") {
    CHECK(map_to_index(15, 10, 4) == 9);
    CHECK(map_to_index(1, 10, 4) == 0);

    SUBCASE("w=8 over 300 items: no bucket gets more than two states") {
        std::vector<int> hist(300, 0);
        for (std::uint32_t s = 1; s < 256; ++s) ++hist[map_to_index(s, 300, 8)];
        CHECK(*std::max_element(hist.begin(), hist.end()) <= 2);
    }

    SUBCASE("monotone, in range, and surjective when n <= 2^w - 1") {
        for (unsigned w : {4u, 7u, 10u}) {
            const std::uint32_t states = (1u << w) - 1;
            for (std::uint32_t n : {1u, 2u, 3u, 10u, states / 2, states}) {
                if (n == 0) continue;
                std::vector<char> covered(n, 0);
                std::uint32_t prev = 0;
                for (std::uint32_t s = 1; s <= states; ++s) {
                    const std::uint32_t idx = map_to_index(s, n, w);
                    REQUIRE(idx < n);
                    REQUIRE(idx >= prev);
                    prev = idx;
                    covered[idx] = 1;
                }
                CHECK(std::count(covered.begin(), covered.end(), 1) == static_cast<long>(n));
            }
        }
    }
}

TEST_CASE("text form round trip and errors") {
    const LfsrSpec spec = make_spec(16, {16, 15, 13, 4}, 0xACE1);
    CHECK(to_string(spec) == "w=16,taps=16+15+13+4,seed=0xace1");
    CHECK(parse_spec(to_string(spec)) == spec);
    CHECK(parse_spec("w=4,taps=4+3,seed=1") == kSpec4);
    CHECK_THROWS_AS(parse_spec("w=4,taps=4+3"), UsageError);
    CHECK_THROWS_AS(parse_spec("w=4,taps=4+x,seed=1"), UsageError);
    CHECK_THROWS_AS(parse_spec("w=4,taps=4+3,seed=1,bogus=2"), UsageError);
}
