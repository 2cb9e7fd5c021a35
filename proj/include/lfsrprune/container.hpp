#pragma once

// "LFSP" model container. Little-endian throughout.
//
//   magic "LFSP" | u16 version (1) | u16 layer count
//   per layer: u8 kind | u32 rows | u32 cols | payload
//
//   kind 0, dense float32:
//     f32 weights[rows * cols] (row-major, input-major) | f32 bias[cols]
//   kind 1, LFSR-sparse:
//     row spec | col spec | u32 nnz | u8 value_bits (8|32) | [f32 scale if 8]
//     | values[nnz] (f32 or i8, mask generation order) | f32 bias[cols]
//     where spec = u8 width | u32 tap bitmask (bit k-1 = exponent k) | u32 seed
//   kind 2, baseline S/I/P:
//     u8 index_bits (4|8) | u8 value_bits (8|32) | [f32 scale if 8] | u32 nnz
//     | u32 |S| | S[|S|] (f32 or i8) | I packed (8-bit: one per byte; 4-bit:
//     two per byte, low nibble first, odd count padded with a zero nibble)
//     | u32 P[cols + 1] | f32 bias[cols]
//
// Sparse layers carry their seeds, so a saved model decodes with no side files.

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "lfsrprune/sparse_codec.hpp"
#include "lfsrprune/tinynet.hpp"

namespace lfsrprune {

inline constexpr std::uint16_t kContainerVersion = 1;

enum class LayerKind : std::uint8_t { Dense = 0, LfsrSparse = 1, Baseline = 2 };

using StoredLayer = std::variant<DenseLayer, LfsrSparseLayer, BaselineCompressed>;

struct StoredModel {
    std::vector<StoredLayer> layers;
    friend bool operator==(const StoredModel&, const StoredModel&) = default;
};

LayerKind kind_of(const StoredLayer& layer);
std::uint32_t rows_of(const StoredLayer& layer);
std::uint32_t cols_of(const StoredLayer& layer);

std::vector<std::uint8_t> to_bytes(const StoredModel& model);
/// Throws FormatError on bad magic, unknown version/kind or truncation.
StoredModel from_bytes(std::span<const std::uint8_t> bytes);

void save_model(const std::filesystem::path& path, const StoredModel& model);
StoredModel load_model(const std::filesystem::path& path);

/// Float32 copy of a trained layer.
DenseLayer to_dense_layer(const tinynet::Layer& layer);

/// Export a trained model. LfsrSparse needs every layer to carry a mask;
/// Baseline encodes whatever zeros the weights have.
StoredModel export_model(const tinynet::Model& model, LayerKind kind, ValueBits bits = ValueBits::F32,
                         unsigned index_bits = 4);

/// Back to a trainable model. LFSR layers get their regenerated mask attached;
/// baseline layers get their zeros as the prune set.
tinynet::Model import_model(const StoredModel& stored);

}  // namespace lfsrprune
