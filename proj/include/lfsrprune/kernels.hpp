#pragma once

// Matrix-vector products for the dense layer and the two sparse datapaths,
// each counting the memory accesses its hardware counterpart would make.
//
// Accounting:
//  * dense: per MAC one weight read and one input read; one output write per
//    column.
//  * LFSR: per kept weight one input read, one weight read, one MAC and a
//    read-modify-write of the output buffer; two register steps (row and
//    column LFSR) per proposed pair, duplicates included. No index or pointer
//    memory exists.
//  * baseline: cols + 1 pointer reads; per stored entry (padding included) one
//    index read, one weight read, one input read and one MAC; the column sum
//    lives in a register and is written once per column.
//
// 32-bit mode accumulates in double starting from the bias; 8-bit mode uses
// int8 weights and inputs with int32 accumulators and an int32 bias.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lfsrprune/sparse_codec.hpp"

namespace lfsrprune {

struct AccessTrace {
    std::uint64_t weight_mem_reads = 0;
    std::uint64_t index_mem_reads = 0;
    std::uint64_t pointer_mem_reads = 0;
    std::uint64_t input_buffer_reads = 0;
    std::uint64_t output_buffer_reads = 0;
    std::uint64_t output_buffer_writes = 0;
    std::uint64_t mac_ops = 0;
    std::uint64_t lfsr_steps = 0;
    std::uint64_t cycles = 0;  // sum of the counters above, one op per cycle

    // Word widths of the model memories, needed to price bit-proportional reads.
    unsigned value_bits = 32;
    unsigned index_bits = 0;

    void finalize();
    AccessTrace& operator+=(const AccessTrace& other);
    friend bool operator==(const AccessTrace&, const AccessTrace&) = default;
};

/// Fixed CSV column names for AccessTrace.
std::string trace_csv_header();
std::string to_csv(const AccessTrace& trace);

enum class Activation { Relu, Identity };

template <class T>
struct MatvecResult {
    std::vector<T> y;
    AccessTrace trace;
};

MatvecResult<double> dense_matvec(const DenseLayer& layer, std::span<const float> x,
                                  Activation act = Activation::Relu);
MatvecResult<double> lfsr_sparse_matvec(const LfsrSparseLayer& sparse, std::span<const float> x,
                                        Activation act = Activation::Relu);
MatvecResult<double> baseline_sparse_matvec(const BaselineCompressed& c, std::span<const float> bias,
                                            std::span<const float> x, Activation act = Activation::Relu);

MatvecResult<std::int32_t> dense_matvec_q8(const DenseQ8Layer& layer, std::span<const std::int32_t> bias,
                                           std::span<const std::int8_t> x, Activation act = Activation::Relu);
MatvecResult<std::int32_t> lfsr_sparse_matvec_q8(const LfsrSparseLayer& sparse, std::span<const std::int32_t> bias,
                                                 std::span<const std::int8_t> x, Activation act = Activation::Relu);
MatvecResult<std::int32_t> baseline_sparse_matvec_q8(const BaselineCompressed& c, std::span<const std::int32_t> bias,
                                                     std::span<const std::int8_t> x,
                                                     Activation act = Activation::Relu);

/// Symmetric int8 quantization of an activation vector; returns the scale.
float quantize_activations(std::span<const float> x, std::vector<std::int8_t>& out);
/// Bias in accumulator units: round(b / (weight_scale * input_scale)).
std::vector<std::int32_t> quantize_bias(std::span<const float> bias, float weight_scale, float input_scale);

}  // namespace lfsrprune
