#pragma once

// Storage formats for a pruned fully-connected layer.
//
//  * LFSR-seed format: the kept values in mask generation order plus the two
//    register specs. Positions are regenerated, never stored.
//  * Baseline S/I/P format: column-major values S, relative zero-gap indices I
//    of index_bits each, and cols + 1 column pointers P.
//
// Gap convention of the baseline format (the decoder is the reference):
// within a column, entry k sits at row prev + I[k] + 1, where prev starts at
// -1 for each column. A gap of g zeros before a nonzero that exceeds
// max_gap = 2^index_bits - 1 is bridged by padding entries (S = 0,
// I = max_gap); each one covers max_gap zeros plus its own slot, so g drops by
// max_gap + 1 per padding entry. Example, 4-bit, nonzeros at rows 0 and 20:
// S = [v0, 0, v20], I = [0, 15, 3].

#include <cstdint>
#include <span>
#include <vector>

#include "lfsrprune/lfsr.hpp"
#include "lfsrprune/mask.hpp"

namespace lfsrprune {

/// Float32 layer with input-major weights (rows = inputs, cols = outputs).
struct DenseLayer {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<float> weights;  // rows * cols, row-major
    std::vector<float> bias;     // cols

    float at(std::uint32_t r, std::uint32_t c) const { return weights[std::size_t{r} * cols + c]; }
    std::size_t nonzeros() const;

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Same shape with int8 weights; what the 8-bit kernels consume.
struct DenseQ8Layer {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<std::int8_t> weights;
    float scale = 1.0f;
};

enum class ValueBits : std::uint8_t { Q8 = 8, F32 = 32 };

/// A packed value sequence: float32, or symmetric int8 with one per-layer
/// scale (value = q * scale, scale = max|w| / 127).
struct ValueArray {
    ValueBits bits = ValueBits::F32;
    float scale = 1.0f;
    std::vector<float> f32;
    std::vector<std::int8_t> q8;

    std::size_t size() const noexcept { return bits == ValueBits::F32 ? f32.size() : q8.size(); }
    float value(std::size_t k) const { return bits == ValueBits::F32 ? f32[k] : static_cast<float>(q8[k]) * scale; }
    bool is_zero(std::size_t k) const { return bits == ValueBits::F32 ? f32[k] == 0.0f : q8[k] == 0; }
    unsigned bit_width() const noexcept { return static_cast<unsigned>(bits); }

    friend bool operator==(const ValueArray&, const ValueArray&) = default;
};

/// scale = max|w| / 127 (1 when all weights are zero).
float q8_scale(std::span<const float> weights);
std::int8_t quantize_q8(float w, float scale);

struct LfsrSparseLayer {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    LfsrSpec row_spec;
    LfsrSpec col_spec;
    std::uint64_t nnz = 0;
    ValueArray values;  // mask generation order
    std::vector<float> bias;

    friend bool operator==(const LfsrSparseLayer&, const LfsrSparseLayer&) = default;
};

struct BaselineCompressed {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    unsigned index_bits = 4;
    ValueArray S;
    std::vector<std::uint8_t> I;
    std::vector<std::uint32_t> P;  // cols + 1
    std::uint64_t nnz = 0;         // true nonzeros (S minus padding)
    std::vector<float> bias;

    std::uint32_t max_gap() const noexcept { return (1u << index_bits) - 1u; }
    /// |S| / nnz; 1 for an empty matrix.
    double alpha() const noexcept {
        return nnz == 0 ? 1.0 : static_cast<double>(S.size()) / static_cast<double>(nnz);
    }

    friend bool operator==(const BaselineCompressed&, const BaselineCompressed&) = default;
};

/// Throws ValidationError if the layer has a nonzero outside the mask or the
/// shapes disagree.
LfsrSparseLayer encode_lfsr(const DenseLayer& layer, const Mask& mask, ValueBits bits = ValueBits::F32);
/// Regenerates the mask and scatters values; throws on replay exhaustion.
DenseLayer decode_lfsr(const LfsrSparseLayer& sparse);
DenseQ8Layer decode_lfsr_q8(const LfsrSparseLayer& sparse);
Mask replay_mask(const LfsrSparseLayer& sparse);

/// index_bits must be 4 or 8. In Q8 mode the nonzero pattern is that of the
/// quantized weights.
BaselineCompressed encode_baseline(const DenseLayer& layer, unsigned index_bits, ValueBits bits = ValueBits::F32);
/// Throws FormatError on malformed P, I overflow or inconsistent padding.
DenseLayer decode_baseline(const BaselineCompressed& c);
DenseQ8Layer decode_baseline_q8(const BaselineCompressed& c);
void check_structure(const BaselineCompressed& c);

/// Storage bits of one encoded layer, by component. Bias is excluded: it is
/// stored identically by both formats.
struct LayerFootprint {
    std::uint64_t value_bits = 0;
    std::uint64_t index_bits = 0;
    std::uint64_t pointer_bits = 0;
    std::uint64_t spec_bits = 0;
    std::uint64_t scale_bits = 0;

    std::uint64_t total() const noexcept { return value_bits + index_bits + pointer_bits + spec_bits + scale_bits; }
};

inline constexpr std::uint64_t kSpecBits = 64;     // per register
inline constexpr std::uint64_t kPointerBits = 32;  // per P entry
inline constexpr std::uint64_t kScaleBits = 32;    // Q8 scale

LayerFootprint footprint(const LfsrSparseLayer& layer);
LayerFootprint footprint(const BaselineCompressed& layer);

struct FootprintReport {
    std::vector<LayerFootprint> proposed;
    std::vector<LayerFootprint> baseline;
    std::uint64_t proposed_total = 0;
    std::uint64_t baseline_total = 0;
    /// baseline_total / proposed_total
    double ratio = 0.0;
};

/// Pairs each LFSR layer with its baseline encoding; value widths must match.
FootprintReport compare_footprint(std::span<const LfsrSparseLayer> proposed,
                                  std::span<const BaselineCompressed> baseline);

}  // namespace lfsrprune
