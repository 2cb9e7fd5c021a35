#include "lfsrprune/lfsr.hpp"

#include <array>
#include <charconv>
#include <mutex>
#include <unordered_map>

#include "lfsrprune/error.hpp"

namespace lfsrprune {
namespace {

// Maximal-length tap sets (Fibonacci form, tap w = output bit), widths 4..24.
// Every entry is re-checked exhaustively by the test suite.
template <unsigned... K>
constexpr std::uint32_t taps_of() { return ((1u << (K - 1)) | ...); }

constexpr std::array<std::uint32_t, kMaxLfsrWidth + 1> kDefaultTaps = {
    0, 0, 0, 0,
    taps_of<4, 3>(),
    taps_of<5, 3>(),
    taps_of<6, 5>(),
    taps_of<7, 6>(),
    taps_of<8, 6, 5, 4>(),
    taps_of<9, 5>(),
    taps_of<10, 7>(),
    taps_of<11, 9>(),
    taps_of<12, 6, 4, 1>(),
    taps_of<13, 4, 3, 1>(),
    taps_of<14, 5, 3, 1>(),
    taps_of<15, 14>(),
    taps_of<16, 15, 13, 4>(),
    taps_of<17, 14>(),
    taps_of<18, 11>(),
    taps_of<19, 6, 2, 1>(),
    taps_of<20, 17>(),
    taps_of<21, 19>(),
    taps_of<22, 21>(),
    taps_of<23, 18>(),
    taps_of<24, 23, 22, 17>(),
};

void check_width(unsigned width) {
    if (width < kMinLfsrWidth || width > kMaxLfsrWidth) {
        throw ValidationError("width out of range: " + std::to_string(width) + " (expected 4..24)");
    }
}

std::uint64_t count_period(const LfsrSpec& spec) {
    Lfsr reg(spec);
    const std::uint64_t limit = std::uint64_t{1} << spec.width;
    for (std::uint64_t n = 1; n <= limit; ++n) {
        if (reg.next() == spec.seed) return n;
    }
    // The register is a bijection whenever tap w is present, so this is only
    // reached for malformed taps where the seed falls off its own cycle.
    return 0;
}

std::uint32_t parse_uint(std::string_view text, int base, const char* field) {
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw UsageError(std::string("bad LFSR ") + field + ": '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

std::uint32_t LfsrSpec::feedback_mask() const noexcept {
    std::uint32_t mask = 0;
    for (unsigned k = 1; k <= width; ++k) {
        if (has_tap(k)) mask |= 1u << (width - k);
    }
    return mask;
}

std::vector<unsigned> LfsrSpec::tap_list() const {
    std::vector<unsigned> out;
    for (unsigned k = 32; k >= 1; --k) {
        if (has_tap(k)) out.push_back(k);
    }
    return out;
}

std::uint32_t make_taps(std::initializer_list<unsigned> exponents) {
    std::uint32_t taps = 0;
    for (unsigned k : exponents) {
        if (k < 1 || k > 32) throw ValidationError("malformed taps: exponent " + std::to_string(k));
        taps |= 1u << (k - 1);
    }
    return taps;
}

LfsrSpec make_spec(unsigned width, std::initializer_list<unsigned> taps, std::uint32_t seed) {
    return {width, make_taps(taps), seed};
}

LfsrState step(LfsrState state, const LfsrSpec& spec) {
    if (state.current == 0) throw ValidationError("LFSR lockup: all-zero state");
    const std::uint32_t bit = static_cast<std::uint32_t>(__builtin_parity(state.current & spec.feedback_mask()));
    state.current = (state.current >> 1) | (bit << (spec.width - 1));
    ++state.steps_taken;
    return state;
}

std::uint64_t period(const LfsrSpec& spec) {
    check_width(spec.width);
    if (spec.seed == 0) throw ValidationError("zero seed");
    if (spec.seed > spec.state_mask()) throw ValidationError("seed exceeds width");
    return count_period(spec);
}

bool is_maximal(unsigned width, std::uint32_t taps) {
    check_width(width);
    static std::mutex mutex;
    static std::unordered_map<std::uint64_t, bool> cache;
    const std::uint64_t key = (std::uint64_t{width} << 32) | taps;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    // A full-length cycle contains every nonzero state, so one seed decides.
    const bool maximal = count_period({width, taps, 1}) == (std::uint64_t{1} << width) - 1;
    std::lock_guard lock(mutex);
    cache.emplace(key, maximal);
    return maximal;
}

const LfsrSpec& validate_spec(const LfsrSpec& spec) {
    check_width(spec.width);
    if (spec.seed == 0) throw ValidationError("zero seed");
    if (spec.seed > spec.state_mask()) throw ValidationError("seed exceeds width");
    if (!spec.has_tap(spec.width) || (spec.taps & ~spec.state_mask()) != 0) {
        throw ValidationError("malformed taps: must contain the width and nothing above it");
    }
    if (!is_maximal(spec.width, spec.taps)) throw ValidationError("non-maximal period for taps " + to_string(spec));
    return spec;
}

std::uint32_t default_taps(unsigned width) {
    check_width(width);
    return kDefaultTaps[width];
}

LfsrSpec default_spec(unsigned width, std::uint32_t seed) {
    return {width, default_taps(width), seed};
}

std::string to_string(const LfsrSpec& spec) {
    std::string out = "w=" + std::to_string(spec.width) + ",taps=";
    bool first = true;
    for (unsigned k : spec.tap_list()) {
        if (!first) out += '+';
        out += std::to_string(k);
        first = false;
    }
    char hex[16];
    auto [end, ec] = std::to_chars(hex, hex + sizeof hex, spec.seed, 16);
    (void)ec;
    out += ",seed=0x";
    out.append(hex, end);
    return out;
}

LfsrSpec parse_spec(std::string_view text) {
    LfsrSpec spec;
    bool seen_w = false, seen_taps = false, seen_seed = false;
    while (!text.empty()) {
        const auto comma = text.find(',');
        std::string_view field = text.substr(0, comma);
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);

        const auto eq = field.find('=');
        if (eq == std::string_view::npos) throw UsageError("bad LFSR spec field: '" + std::string(field) + "'");
        const std::string_view key = field.substr(0, eq);
        std::string_view value = field.substr(eq + 1);

        if (key == "w") {
            spec.width = parse_uint(value, 10, "width");
            seen_w = true;
        } else if (key == "taps") {
            spec.taps = 0;
            while (!value.empty()) {
                const auto plus = value.find('+');
                const unsigned k = parse_uint(value.substr(0, plus), 10, "tap");
                if (k < 1 || k > 32) throw UsageError("bad LFSR tap: " + std::to_string(k));
                spec.taps |= 1u << (k - 1);
                value = plus == std::string_view::npos ? std::string_view{} : value.substr(plus + 1);
            }
            seen_taps = true;
        } else if (key == "seed") {
            if (value.starts_with("0x") || value.starts_with("0X")) value.remove_prefix(2);
            spec.seed = parse_uint(value, 16, "seed");
            seen_seed = true;
        } else {
            throw UsageError("unknown LFSR spec key: '" + std::string(key) + "'");
        }
    }
    if (!seen_w || !seen_taps || !seen_seed) throw UsageError("LFSR spec needs w=, taps= and seed=");
    return spec;
}

}  // namespace lfsrprune
