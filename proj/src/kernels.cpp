#include "lfsrprune/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lfsrprune/error.hpp"
#include "lfsrprune/simd.hpp"

namespace lfsrprune {

void AccessTrace::finalize() {
    cycles = weight_mem_reads + index_mem_reads + pointer_mem_reads + input_buffer_reads + output_buffer_reads +
             output_buffer_writes + mac_ops + lfsr_steps;
}

AccessTrace& AccessTrace::operator+=(const AccessTrace& o) {
    weight_mem_reads += o.weight_mem_reads;
    index_mem_reads += o.index_mem_reads;
    pointer_mem_reads += o.pointer_mem_reads;
    input_buffer_reads += o.input_buffer_reads;
    output_buffer_reads += o.output_buffer_reads;
    output_buffer_writes += o.output_buffer_writes;
    mac_ops += o.mac_ops;
    lfsr_steps += o.lfsr_steps;
    cycles += o.cycles;
    return *this;
}

std::string trace_csv_header() {
    return "weight_mem_reads,index_mem_reads,pointer_mem_reads,input_buffer_reads,output_buffer_reads,"
           "output_buffer_writes,mac_ops,lfsr_steps,cycles,value_bits,index_bits";
}

std::string to_csv(const AccessTrace& t) {
    std::ostringstream out;
    out << t.weight_mem_reads << ',' << t.index_mem_reads << ',' << t.pointer_mem_reads << ',' << t.input_buffer_reads
        << ',' << t.output_buffer_reads << ',' << t.output_buffer_writes << ',' << t.mac_ops << ',' << t.lfsr_steps
        << ',' << t.cycles << ',' << t.value_bits << ',' << t.index_bits;
    return out.str();
}

namespace {

template <class T>
void activate(std::vector<T>& y, Activation act) {
    if (act != Activation::Relu) return;
    if constexpr (std::is_same_v<T, double>) {
        simd::relu(y);
    } else {
        for (T& v : y) v = std::max(v, T{0});
    }
}

void check_input(std::size_t got, std::uint32_t rows) {
    if (got != rows) {
        throw ValidationError("input length " + std::to_string(got) + " does not match " + std::to_string(rows) +
                              " rows");
    }
}

void check_bias(std::size_t got, std::uint32_t cols) {
    if (got != cols) throw ValidationError("bias length does not match cols");
}

AccessTrace dense_trace(std::uint32_t rows, std::uint32_t cols, unsigned value_bits) {
    AccessTrace t;
    const std::uint64_t n = std::uint64_t{rows} * cols;
    t.weight_mem_reads = n;
    t.input_buffer_reads = n;
    t.mac_ops = n;
    t.output_buffer_writes = cols;
    t.value_bits = value_bits;
    t.finalize();
    return t;
}

// The replayed pair stream drives both LFSR kernels; `mac(row, col, k)` does
// the arithmetic for the k-th kept weight.
template <class Mac>
AccessTrace replay_lfsr(const LfsrSparseLayer& sparse, Mac mac) {
    if (sparse.values.size() != sparse.nnz) throw FormatError("LFSR layer value count differs from nnz");
    AccessTrace t;
    t.value_bits = sparse.values.bit_width();
    if (sparse.nnz == 0) {
        t.finalize();
        return t;
    }
    MaskStream stream(sparse.rows, sparse.cols, sparse.nnz, sparse.row_spec, sparse.col_spec);
    std::size_t k = 0;
    while (auto p = stream.next()) {
        mac(p->row, p->col, k++);
    }
    t.input_buffer_reads = sparse.nnz;
    t.weight_mem_reads = sparse.nnz;
    t.mac_ops = sparse.nnz;
    t.output_buffer_reads = sparse.nnz;
    t.output_buffer_writes = sparse.nnz;
    t.lfsr_steps = 2 * stream.steps();
    t.finalize();
    return t;
}

// Walks the S/I/P vectors column by column. `begin(col)` loads the column
// register with the bias, `entry(k, row)` accumulates one stored entry
// (padding entries carry a zero value), `store(col)` writes the register out.
template <class Begin, class Entry, class Store>
AccessTrace walk_baseline(const BaselineCompressed& c, Begin begin, Entry entry, Store store) {
    check_structure(c);
    AccessTrace t;
    t.value_bits = c.S.bit_width();
    t.index_bits = c.index_bits;
    t.pointer_mem_reads = std::uint64_t{c.cols} + 1;
    for (std::uint32_t col = 0; col < c.cols; ++col) {
        begin(col);
        std::int64_t row = -1;
        for (std::uint32_t k = c.P[col]; k < c.P[col + 1]; ++k) {
            row += std::int64_t{c.I[k]} + 1;
            entry(k, static_cast<std::uint32_t>(row));
        }
        store(col);
    }
    const std::uint64_t stored = c.S.size();
    t.index_mem_reads = stored;
    t.weight_mem_reads = stored;
    t.input_buffer_reads = stored;
    t.mac_ops = stored;
    t.output_buffer_writes = c.cols;
    t.finalize();
    return t;
}

}  // namespace

MatvecResult<double> dense_matvec(const DenseLayer& layer, std::span<const float> x, Activation act) {
    check_input(x.size(), layer.rows);
    check_bias(layer.bias.size(), layer.cols);
    MatvecResult<double> out;
    out.y.assign(layer.bias.begin(), layer.bias.end());
    for (std::uint32_t r = 0; r < layer.rows; ++r) {
        simd::axpy(static_cast<double>(x[r]),
                   std::span<const float>(layer.weights.data() + std::size_t{r} * layer.cols, layer.cols), out.y);
    }
    activate(out.y, act);
    out.trace = dense_trace(layer.rows, layer.cols, 32);
    return out;
}

MatvecResult<double> lfsr_sparse_matvec(const LfsrSparseLayer& sparse, std::span<const float> x, Activation act) {
    check_input(x.size(), sparse.rows);
    check_bias(sparse.bias.size(), sparse.cols);
    MatvecResult<double> out;
    out.y.assign(sparse.bias.begin(), sparse.bias.end());
    out.trace = replay_lfsr(sparse, [&](std::uint32_t row, std::uint32_t col, std::size_t k) {
        out.y[col] += static_cast<double>(sparse.values.value(k)) * static_cast<double>(x[row]);
    });
    activate(out.y, act);
    return out;
}

MatvecResult<double> baseline_sparse_matvec(const BaselineCompressed& c, std::span<const float> bias,
                                            std::span<const float> x, Activation act) {
    check_input(x.size(), c.rows);
    check_bias(bias.size(), c.cols);
    MatvecResult<double> out;
    out.y.resize(c.cols);
    double acc = 0.0;
    out.trace = walk_baseline(
        c, [&](std::uint32_t col) { acc = static_cast<double>(bias[col]); },
        [&](std::uint32_t k, std::uint32_t row) {
            acc += static_cast<double>(x[row]) * static_cast<double>(c.S.value(k));
        },
        [&](std::uint32_t col) { out.y[col] = acc; });
    activate(out.y, act);
    return out;
}

MatvecResult<std::int32_t> dense_matvec_q8(const DenseQ8Layer& layer, std::span<const std::int32_t> bias,
                                           std::span<const std::int8_t> x, Activation act) {
    check_input(x.size(), layer.rows);
    check_bias(bias.size(), layer.cols);
    MatvecResult<std::int32_t> out;
    out.y.assign(bias.begin(), bias.end());
    for (std::uint32_t r = 0; r < layer.rows; ++r) {
        simd::axpy(static_cast<std::int32_t>(x[r]),
                   std::span<const std::int8_t>(layer.weights.data() + std::size_t{r} * layer.cols, layer.cols),
                   std::span<std::int32_t>(out.y));
    }
    activate(out.y, act);
    out.trace = dense_trace(layer.rows, layer.cols, 8);
    return out;
}

MatvecResult<std::int32_t> lfsr_sparse_matvec_q8(const LfsrSparseLayer& sparse, std::span<const std::int32_t> bias,
                                                 std::span<const std::int8_t> x, Activation act) {
    if (sparse.values.bits != ValueBits::Q8) throw ValidationError("8-bit kernel needs 8-bit values");
    check_input(x.size(), sparse.rows);
    check_bias(bias.size(), sparse.cols);
    MatvecResult<std::int32_t> out;
    out.y.assign(bias.begin(), bias.end());
    out.trace = replay_lfsr(sparse, [&](std::uint32_t row, std::uint32_t col, std::size_t k) {
        out.y[col] += std::int32_t{sparse.values.q8[k]} * std::int32_t{x[row]};
    });
    activate(out.y, act);
    return out;
}

MatvecResult<std::int32_t> baseline_sparse_matvec_q8(const BaselineCompressed& c, std::span<const std::int32_t> bias,
                                                     std::span<const std::int8_t> x, Activation act) {
    if (c.S.bits != ValueBits::Q8) throw ValidationError("8-bit kernel needs 8-bit values");
    check_input(x.size(), c.rows);
    check_bias(bias.size(), c.cols);
    MatvecResult<std::int32_t> out;
    out.y.resize(c.cols);
    std::int32_t acc = 0;
    out.trace = walk_baseline(
        c, [&](std::uint32_t col) { acc = bias[col]; },
        [&](std::uint32_t k, std::uint32_t row) { acc += std::int32_t{c.S.q8[k]} * std::int32_t{x[row]}; },
        [&](std::uint32_t col) { out.y[col] = acc; });
    activate(out.y, act);
    return out;
}

float quantize_activations(std::span<const float> x, std::vector<std::int8_t>& out) {
    const float scale = q8_scale(x);
    out.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = quantize_q8(x[i], scale);
    return scale;
}

std::vector<std::int32_t> quantize_bias(std::span<const float> bias, float weight_scale, float input_scale) {
    const double unit = static_cast<double>(weight_scale) * static_cast<double>(input_scale);
    std::vector<std::int32_t> out(bias.size());
    for (std::size_t i = 0; i < bias.size(); ++i) {
        const double q = std::round(static_cast<double>(bias[i]) / unit);
        out[i] = static_cast<std::int32_t>(std::clamp(q, -2147483647.0, 2147483647.0));
    }
    return out;
}

}  // namespace lfsrprune
