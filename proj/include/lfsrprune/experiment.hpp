#pragma once

// Experiment drivers shared by the CLI and the acceptance suite.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lfsrprune/container.hpp"
#include "lfsrprune/cost_model.hpp"
#include "lfsrprune/dataset.hpp"
#include "lfsrprune/tinynet.hpp"

namespace lfsrprune {

/// "synthetic" (seeded 8-feature, 3-class blobs) or "mnist:<dir>".
DataSplit load_data_source(const std::string& source, std::uint64_t seed);

struct LayerShape {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::string name() const { return std::to_string(rows) + "x" + std::to_string(cols); }
};

/// Parses "300x100".
LayerShape parse_shape(std::string_view text);

/// A layer of the given shape pruned to an LFSR mask, with kept weights drawn
/// uniformly from +-[0.1, 1] so none quantizes to zero.
struct SyntheticSparseLayer {
    DenseLayer dense;
    Mask mask;
};
SyntheticSparseLayer make_sparse_layer(LayerShape shape, double sparsity, std::uint32_t seed);

/// Encodes one layer both ways with 8-bit values, runs both kernels for the
/// traces and compares storage and energy.
CostPoint evaluate_design(const SyntheticSparseLayer& layer, unsigned index_bits, const CostTable& table,
                          double sparsity);

std::vector<CostPoint> design_grid(const std::vector<LayerShape>& shapes, const std::vector<double>& sparsities,
                                   const std::vector<unsigned>& index_bits, const CostTable& table,
                                   std::uint32_t seed);

/// Rank of a seeded Gaussian rows x cols matrix before and after applying an
/// LFSR mask at `sparsity`.
struct RankTrial {
    std::size_t dense_rank = 0;
    std::size_t masked_rank = 0;
};
RankTrial rank_trial(std::uint32_t rows, std::uint32_t cols, double sparsity, std::uint32_t seed);

struct InferenceResult {
    double accuracy = 0.0;
    std::vector<AccessTrace> layer_traces;  // summed over samples
};

/// Runs every sample through the stored model with the kernel matching each
/// layer kind. In 8-bit mode activations are quantized per vector and every
/// layer must hold 8-bit values (dense layers are quantized on the fly).
InferenceResult infer(const StoredModel& model, const Dataset& data, bool int8_mode);

struct ExperimentConfig {
    std::vector<std::size_t> architecture = {8, 16, 3};
    std::string dataset = "synthetic";
    std::vector<double> sparsities = {0.7};
    std::vector<double> lambdas = {2.0};
    std::vector<tinynet::RegKind> reg_kinds = {tinynet::RegKind::L2};
    std::vector<unsigned> index_bits = {4, 8};
    std::vector<std::uint64_t> seeds = {1};
    std::filesystem::path output_dir = "sweep-out";
    tinynet::TrainConfig train;
    /// Also run the magnitude baseline at each sparsity (iterations, retrain epochs).
    std::size_t magnitude_iterations = 0;
    std::size_t magnitude_retrain_epochs = 2;

    /// Throws UsageError on empty sweeps or bad values.
    void validate() const;
};

struct SweepRow {
    std::size_t run = 0;
    double sparsity = 0.0;
    double lambda = 0.0;
    tinynet::RegKind reg_kind = tinynet::RegKind::L2;
    std::uint64_t seed = 0;
    tinynet::PipelineReport report;
    double magnitude_test_acc = -1.0;  // -1 when not run
};

struct SweepResult {
    std::vector<SweepRow> runs;
    std::vector<CostPoint> costs;  // one per run x index_bits, trained layers, 8-bit values
};

std::string sweep_csv_header();
std::string to_csv(const SweepRow& row);

/// Runs every (sparsity, lambda, reg kind, seed) point and writes runs.csv,
/// run_<k>_stages.csv, run_<k>.json, costs.csv, cost_table.txt and
/// summary.txt under config.output_dir (created if needed). Each run's files
/// are written as soon as it finishes. An empty output_dir skips all writes.
SweepResult run_sweep(const ExperimentConfig& config, const CostTable& table = {});

}  // namespace lfsrprune
