#pragma once

// Fibonacci linear feedback shift registers.
//
// A register of width w holds a nonzero w-bit state. Each step computes the
// feedback bit as the XOR of the tapped bits, shifts the state one place
// toward the least-significant end and inserts the feedback bit at the
// most-significant position. Tap k (1 <= k <= w) reads state bit w - k
// (0-indexed from the LSB), so tap w always reads the bit being shifted
// out. With that convention the tap set {w, k1, k2, ...} realizes the
// recurrence s[t+w] = XOR_k s[t+w-k], i.e. the polynomial
// x^w + x^(w-k1) + ... + 1 (the reciprocal of 1 + x^k1 + ... + x^w; both
// are primitive together).

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lfsrprune {

inline constexpr unsigned kMinLfsrWidth = 4;
inline constexpr unsigned kMaxLfsrWidth = 24;

struct LfsrSpec {
    unsigned width = 0;
    /// Bit (k - 1) set means exponent k is a tap.
    std::uint32_t taps = 0;
    std::uint32_t seed = 0;

    bool has_tap(unsigned k) const noexcept { return k >= 1 && k <= 32 && ((taps >> (k - 1)) & 1u) != 0; }
    std::uint32_t state_mask() const noexcept { return width >= 32 ? ~0u : (1u << width) - 1u; }
    /// State bits read by the feedback XOR.
    std::uint32_t feedback_mask() const noexcept;
    std::vector<unsigned> tap_list() const;  // descending

    friend bool operator==(const LfsrSpec&, const LfsrSpec&) = default;
};

struct LfsrState {
    std::uint32_t current = 0;
    std::uint64_t steps_taken = 0;

    friend bool operator==(const LfsrState&, const LfsrState&) = default;
};

/// Build a tap bitmask from exponents, e.g. make_taps({4, 3}).
std::uint32_t make_taps(std::initializer_list<unsigned> exponents);

LfsrSpec make_spec(unsigned width, std::initializer_list<unsigned> taps, std::uint32_t seed);

inline LfsrState initial_state(const LfsrSpec& spec) { return {spec.seed, 0}; }

/// One shift. Throws ValidationError on the all-zero lockup state.
LfsrState step(LfsrState state, const LfsrSpec& spec);

/// Steps until the seed recurs. Requires width <= 24 and a nonzero seed.
std::uint64_t period(const LfsrSpec& spec);

/// Returns the spec unchanged iff it is usable; throws ValidationError naming
/// the failed invariant otherwise ("width out of range", "zero seed",
/// "seed exceeds width", "malformed taps", "non-maximal period").
const LfsrSpec& validate_spec(const LfsrSpec& spec);

bool is_maximal(unsigned width, std::uint32_t taps);

/// Multiply-and-keep-MSBs mapping of a w-bit state onto [0, n_items).
constexpr std::uint32_t map_to_index(std::uint32_t state_value, std::uint32_t n_items, unsigned width) noexcept {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(state_value) * n_items) >> width);
}

/// Shipped primitive tap set for widths 4..24.
std::uint32_t default_taps(unsigned width);
LfsrSpec default_spec(unsigned width, std::uint32_t seed);

/// Text form: "w=<int>,taps=<int>[+<int>...],seed=<hex>".
std::string to_string(const LfsrSpec& spec);
LfsrSpec parse_spec(std::string_view text);

/// Stateful register for hot loops; caches the feedback mask.
class Lfsr {
public:
    explicit Lfsr(const LfsrSpec& spec)
        : state_(spec.seed), feedback_(spec.feedback_mask()), top_(spec.width - 1) {}

    std::uint32_t state() const noexcept { return state_; }

    std::uint32_t next() noexcept {
        const std::uint32_t bit = static_cast<std::uint32_t>(__builtin_parity(state_ & feedback_));
        state_ = (state_ >> 1) | (bit << top_);
        return state_;
    }

private:
    std::uint32_t state_;
    std::uint32_t feedback_;
    unsigned top_;
};

}  // namespace lfsrprune
