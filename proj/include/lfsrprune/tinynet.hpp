#pragma once

// A small fully-connected network trainer: dense training, regularization of
// a pseudo-randomly selected prune set, hard pruning, and retraining with the
// pruned weights pinned at zero. Also hosts the iterative magnitude-threshold
// baseline.
//
// Weights are stored input-major: weights(r, c) connects input r to output c,
// so a layer computes z = W^T x + b.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lfsrprune/dataset.hpp"
#include "lfsrprune/mask.hpp"

namespace lfsrprune::tinynet {

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

struct Layer {
    Matrix weights;
    std::vector<double> bias;
    /// The LFSR mask, once the layer has entered the regularize/prune phases.
    std::optional<Mask> mask;
    /// Row-major, 1 where the weight belongs to the prune set. Empty means no
    /// prune set. Derived from `mask`, or set directly by the magnitude baseline.
    std::vector<std::uint8_t> prune_flags;

    std::size_t inputs() const noexcept { return weights.rows; }
    std::size_t outputs() const noexcept { return weights.cols; }
    bool has_prune_set() const noexcept { return !prune_flags.empty(); }
    bool in_prune_set(std::size_t i) const { return !prune_flags.empty() && prune_flags[i] != 0; }

    void attach_mask(Mask m);
    /// Fraction of weights that are exactly zero.
    double sparsity() const;
};

/// Hidden layers use ReLU, the last layer softmax.
struct Model {
    std::vector<Layer> layers;

    std::vector<std::size_t> architecture() const;
    std::size_t weight_count() const;
    std::size_t nonzero_weight_count() const;
    /// Throws ValidationError if consecutive dimensions do not chain.
    void validate() const;
};

/// Scaled-uniform init U(-sqrt(6 / (fan_in + fan_out)), +...), zero biases.
Model make_model(std::span<const std::size_t> sizes, std::uint64_t seed);

enum class RegKind { L1, L2 };
enum class Phase { Train, Regularize, Retrain };

std::string to_string(RegKind kind);
std::string to_string(Phase phase);
RegKind parse_reg_kind(std::string_view text);

struct TrainConfig {
    double learning_rate = 0.05;  // beta
    double reg_strength = 2.0;    // lambda
    RegKind reg_kind = RegKind::L2;
    std::size_t batch_size = 32;  // m
    std::size_t train_epochs = 15;
    std::size_t regularize_epochs = 8;
    std::size_t retrain_epochs = 8;
    std::uint64_t seed = 1;

    /// Throws ValidationError unless beta > 0, lambda >= 0, m >= 1.
    void validate() const;
};

struct Activations {
    /// a[0] is the input; a[l + 1] is the output of layer l (softmax for the last).
    std::vector<std::vector<double>> a;
    std::vector<std::vector<double>> z;

    std::span<const double> output() const { return a.back(); }
};

Activations forward(const Model& model, std::span<const double> x);

/// Mean cross-entropy over the batch plus, over every layer's prune set,
/// (lambda / 2m) sum w^2 (L2) or (lambda / m) sum |w| (L1). m = batch size.
double loss(const Model& model, const Dataset& data, std::span<const std::size_t> batch, const TrainConfig& config);

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> bias;
};

/// Gradient of the mean cross-entropy alone.
Gradients data_gradients(const Model& model, const Dataset& data, std::span<const std::size_t> batch);

/// The direction sgd_step moves along (before L1 clamping and retrain pinning):
/// train: data gradient everywhere; regularize: prune-set weights get only the
/// regularizer gradient, the rest the data gradient; retrain: zero on the
/// prune set, data gradient elsewhere.
Gradients update_direction(const Model& model, const Dataset& data, std::span<const std::size_t> batch,
                           const TrainConfig& config, Phase phase);

/// One mini-batch update. In the regularize phase prune-set weights only decay:
/// w * (1 - beta lambda / m) for L2, or w - (beta lambda / m) sign(w) clamped at
/// zero for L1. Throws ValidationError when beta lambda / m >= 1.
void sgd_step(Model& model, const Dataset& data, std::span<const std::size_t> batch, const TrainConfig& config,
              Phase phase);

/// One pass over `data` in seeded shuffled mini-batches.
void run_epoch(Model& model, const Dataset& data, const TrainConfig& config, Phase phase, std::uint64_t epoch_salt);

/// Zero every prune-set weight. Throws ValidationError if a layer has no mask.
void prune(Model& model);

/// Top-1 accuracy. Throws ValidationError on an empty dataset.
double evaluate(const Model& model, const Dataset& data);

double mean_abs_prune_set_weight(const Model& model);

/// Iterative magnitude pruning: iteration k of n zeroes the smallest-magnitude
/// weights of each layer up to sparsity target * k / n, then retrains with the
/// zeroed positions pinned.
void magnitude_prune_baseline(Model& model, const Dataset& train, const TrainConfig& config, double target_sparsity,
                              std::size_t iterations, std::size_t retrain_epochs);

struct StageRow {
    std::string stage;  // train | regularize | prune | retrain
    std::size_t epoch = 0;
    double train_acc = 0.0;
    double test_acc = 0.0;
    double sparsity = 0.0;
    double mean_abs_pruneset_weight = 0.0;
};

struct PipelineReport {
    double sparsity_target = 0.0;
    double dense_train_acc = 0.0, dense_test_acc = 0.0;
    double regularized_test_acc = 0.0;
    double pruned_test_acc = 0.0;  // after prune, before retraining
    double retrained_train_acc = 0.0, retrained_test_acc = 0.0;
    double mean_abs_pruneset_after_regularize = 0.0;
    std::vector<double> layer_sparsity;
    std::vector<std::pair<LfsrSpec, LfsrSpec>> mask_specs;
    /// dense weight count / kept weight count
    double compression_rate = 1.0;
    std::vector<StageRow> rows;
};

struct PipelineResult {
    PipelineReport report;
    Model dense;
    Model pruned;  // after retraining
};

/// train -> generate masks -> regularize -> prune -> retrain. Layer l uses
/// default_mask_specs(inputs, outputs, mask_seed + l).
PipelineResult run_pipeline(const DataSplit& data, std::span<const std::size_t> architecture,
                            const TrainConfig& config, double sparsity, std::uint32_t mask_seed);

/// Continue a pipeline from an already trained dense model.
PipelineResult prune_and_retrain(const DataSplit& data, Model dense, const TrainConfig& config, double sparsity,
                                 std::uint32_t mask_seed);

/// Dense compression rate for uniform sparsity: 1 / (1 - sparsity).
double compression_rate(std::size_t dense_weights, std::size_t kept_weights);

std::string pipeline_csv_header();
std::string to_csv(const StageRow& row);
/// JSON summary of the report (accuracies, sparsities, LFSR specs).
std::string to_json(const PipelineReport& report);

}  // namespace lfsrprune::tinynet
