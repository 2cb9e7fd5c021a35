#include "lfsrprune/sparse_codec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lfsrprune/error.hpp"

namespace lfsrprune {

std::size_t DenseLayer::nonzeros() const {
    return static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [](float w) { return w != 0.0f; }));
}

float q8_scale(std::span<const float> weights) {
    float peak = 0.0f;
    for (float w : weights) peak = std::max(peak, std::abs(w));
    if (peak == 0.0f) return 1.0f;
    return static_cast<float>(static_cast<double>(peak) / 127.0);
}

std::int8_t quantize_q8(float w, float scale) {
    const long q = std::lround(static_cast<double>(w) / static_cast<double>(scale));
    return static_cast<std::int8_t>(std::clamp(q, -127L, 127L));
}

namespace {

void check_shape(const DenseLayer& layer) {
    if (layer.weights.size() != std::size_t{layer.rows} * layer.cols) {
        throw ValidationError("dense layer weight count does not match its shape");
    }
    if (layer.bias.size() != layer.cols) throw ValidationError("dense layer bias length does not match cols");
}

void push_value(ValueArray& out, float w) {
    if (out.bits == ValueBits::F32) {
        out.f32.push_back(w);
    } else {
        out.q8.push_back(quantize_q8(w, out.scale));
    }
}

ValueArray empty_values(const DenseLayer& layer, ValueBits bits) {
    ValueArray v;
    v.bits = bits;
    if (bits == ValueBits::Q8) v.scale = q8_scale(layer.weights);
    return v;
}

}  // namespace

LfsrSparseLayer encode_lfsr(const DenseLayer& layer, const Mask& mask, ValueBits bits) {
    check_shape(layer);
    if (mask.rows() != layer.rows || mask.cols() != layer.cols) throw ValidationError("mask shape does not match layer");
    for (std::size_t i = 0; i < layer.weights.size(); ++i) {
        if (layer.weights[i] != 0.0f && !mask.kept_flags()[i]) {
            throw ValidationError("layer is not pruned to its mask (nonzero at flat index " + std::to_string(i) + ")");
        }
    }
    LfsrSparseLayer out;
    out.rows = layer.rows;
    out.cols = layer.cols;
    out.row_spec = mask.row_spec();
    out.col_spec = mask.col_spec();
    out.nnz = mask.kept().size();
    out.values = empty_values(layer, bits);
    for (const Position& p : mask.kept()) push_value(out.values, layer.at(p.row, p.col));
    out.bias = layer.bias;
    return out;
}

Mask replay_mask(const LfsrSparseLayer& sparse) {
    if (sparse.values.size() != sparse.nnz) throw FormatError("LFSR layer value count differs from nnz");
    return generate_mask_count(sparse.rows, sparse.cols, sparse.nnz, sparse.row_spec, sparse.col_spec);
}

DenseLayer decode_lfsr(const LfsrSparseLayer& sparse) {
    const Mask mask = replay_mask(sparse);
    DenseLayer out{sparse.rows, sparse.cols, std::vector<float>(std::size_t{sparse.rows} * sparse.cols, 0.0f),
                   sparse.bias};
    for (std::size_t k = 0; k < mask.kept().size(); ++k) {
        const Position p = mask.kept()[k];
        out.weights[std::size_t{p.row} * sparse.cols + p.col] = sparse.values.value(k);
    }
    return out;
}

DenseQ8Layer decode_lfsr_q8(const LfsrSparseLayer& sparse) {
    if (sparse.values.bits != ValueBits::Q8) throw ValidationError("decode_lfsr_q8 needs 8-bit values");
    const Mask mask = replay_mask(sparse);
    DenseQ8Layer out{sparse.rows, sparse.cols, std::vector<std::int8_t>(std::size_t{sparse.rows} * sparse.cols, 0),
                     sparse.values.scale};
    for (std::size_t k = 0; k < mask.kept().size(); ++k) {
        const Position p = mask.kept()[k];
        out.weights[std::size_t{p.row} * sparse.cols + p.col] = sparse.values.q8[k];
    }
    return out;
}

BaselineCompressed encode_baseline(const DenseLayer& layer, unsigned index_bits, ValueBits bits) {
    check_shape(layer);
    if (index_bits != 4 && index_bits != 8) throw UsageError("index bits must be 4 or 8");
    BaselineCompressed out;
    out.rows = layer.rows;
    out.cols = layer.cols;
    out.index_bits = index_bits;
    out.S = empty_values(layer, bits);
    out.bias = layer.bias;
    out.P.reserve(layer.cols + 1);
    const std::uint32_t max_gap = out.max_gap();

    for (std::uint32_t c = 0; c < layer.cols; ++c) {
        out.P.push_back(static_cast<std::uint32_t>(out.S.size()));
        std::int64_t prev = -1;
        for (std::uint32_t r = 0; r < layer.rows; ++r) {
            const float w = layer.at(r, c);
            const bool nonzero = bits == ValueBits::F32 ? w != 0.0f : quantize_q8(w, out.S.scale) != 0;
            if (!nonzero) continue;
            auto gap = static_cast<std::uint64_t>(r - prev - 1);
            while (gap > max_gap) {
                push_value(out.S, 0.0f);
                out.I.push_back(static_cast<std::uint8_t>(max_gap));
                gap -= std::uint64_t{max_gap} + 1;
            }
            push_value(out.S, w);
            out.I.push_back(static_cast<std::uint8_t>(gap));
            ++out.nnz;
            prev = r;
        }
    }
    out.P.push_back(static_cast<std::uint32_t>(out.S.size()));
    return out;
}

void check_structure(const BaselineCompressed& c) {
    if (c.index_bits != 4 && c.index_bits != 8) throw FormatError("index bits must be 4 or 8");
    if (c.S.size() != c.I.size()) throw FormatError("|S| != |I|");
    if (c.P.size() != std::size_t{c.cols} + 1) throw FormatError("pointer vector must have cols + 1 entries");
    if (c.P.front() != 0 || c.P.back() != c.S.size()) throw FormatError("pointer vector does not span S");
    if (c.bias.size() != c.cols) throw FormatError("bias length does not match cols");
    std::uint64_t nonzero = 0;
    for (std::uint32_t col = 0; col < c.cols; ++col) {
        if (c.P[col] > c.P[col + 1]) throw FormatError("pointer vector decreases at column " + std::to_string(col));
        std::int64_t row = -1;
        for (std::uint32_t k = c.P[col]; k < c.P[col + 1]; ++k) {
            if (c.I[k] > c.max_gap()) throw FormatError("relative index overflows " + std::to_string(c.index_bits) + " bits");
            row += std::int64_t{c.I[k]} + 1;
            if (row >= c.rows) throw FormatError("column " + std::to_string(col) + " runs past the last row");
            if (c.S.is_zero(k)) {
                if (c.I[k] != c.max_gap()) throw FormatError("zero entry that is not a padding entry");
            } else {
                ++nonzero;
            }
        }
    }
    if (nonzero != c.nnz) throw FormatError("nnz does not match the nonzero entries of S");
}

namespace {

template <class T, class Get>
std::vector<T> scatter_baseline(const BaselineCompressed& c, Get get) {
    check_structure(c);
    std::vector<T> dense(std::size_t{c.rows} * c.cols, T{});
    for (std::uint32_t col = 0; col < c.cols; ++col) {
        std::int64_t row = -1;
        for (std::uint32_t k = c.P[col]; k < c.P[col + 1]; ++k) {
            row += std::int64_t{c.I[k]} + 1;
            if (!c.S.is_zero(k)) dense[static_cast<std::size_t>(row) * c.cols + col] = get(k);
        }
    }
    return dense;
}

}  // namespace

DenseLayer decode_baseline(const BaselineCompressed& c) {
    return {c.rows, c.cols, scatter_baseline<float>(c, [&](std::size_t k) { return c.S.value(k); }), c.bias};
}

DenseQ8Layer decode_baseline_q8(const BaselineCompressed& c) {
    if (c.S.bits != ValueBits::Q8) throw ValidationError("decode_baseline_q8 needs 8-bit values");
    return {c.rows, c.cols, scatter_baseline<std::int8_t>(c, [&](std::size_t k) { return c.S.q8[k]; }), c.S.scale};
}

LayerFootprint footprint(const LfsrSparseLayer& layer) {
    LayerFootprint f;
    f.value_bits = layer.nnz * layer.values.bit_width();
    f.spec_bits = 2 * kSpecBits;
    f.scale_bits = layer.values.bits == ValueBits::Q8 ? kScaleBits : 0;
    return f;
}

LayerFootprint footprint(const BaselineCompressed& layer) {
    LayerFootprint f;
    f.value_bits = layer.S.size() * layer.S.bit_width();
    f.index_bits = layer.I.size() * layer.index_bits;
    f.pointer_bits = (std::uint64_t{layer.cols} + 1) * kPointerBits;
    f.scale_bits = layer.S.bits == ValueBits::Q8 ? kScaleBits : 0;
    return f;
}

FootprintReport compare_footprint(std::span<const LfsrSparseLayer> proposed,
                                  std::span<const BaselineCompressed> baseline) {
    if (proposed.size() != baseline.size()) throw ValidationError("footprint comparison needs matching layer lists");
    FootprintReport rep;
    for (std::size_t l = 0; l < proposed.size(); ++l) {
        if (proposed[l].values.bits != baseline[l].S.bits) {
            throw ValidationError("footprint comparison needs the same value width in both formats");
        }
        rep.proposed.push_back(footprint(proposed[l]));
        rep.baseline.push_back(footprint(baseline[l]));
        rep.proposed_total += rep.proposed.back().total();
        rep.baseline_total += rep.baseline.back().total();
    }
    rep.ratio = rep.proposed_total == 0 ? 0.0
                                        : static_cast<double>(rep.baseline_total) / static_cast<double>(rep.proposed_total);
    return rep;
}

}  // namespace lfsrprune
