#include "lfsrprune/tinynet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "lfsrprune/error.hpp"
#include "lfsrprune/random.hpp"
#include "lfsrprune/simd.hpp"

namespace lfsrprune::tinynet {

void Layer::attach_mask(Mask m) {
    if (m.rows() != inputs() || m.cols() != outputs()) throw ValidationError("mask shape does not match layer");
    prune_flags.resize(m.kept_flags().size());
    std::transform(m.kept_flags().begin(), m.kept_flags().end(), prune_flags.begin(),
                   [](std::uint8_t kept) { return static_cast<std::uint8_t>(kept ? 0 : 1); });
    mask = std::move(m);
}

double Layer::sparsity() const {
    const auto zeros = std::count(weights.data.begin(), weights.data.end(), 0.0);
    return static_cast<double>(zeros) / static_cast<double>(weights.data.size());
}

std::vector<std::size_t> Model::architecture() const {
    std::vector<std::size_t> sizes;
    if (layers.empty()) return sizes;
    sizes.push_back(layers.front().inputs());
    for (const Layer& l : layers) sizes.push_back(l.outputs());
    return sizes;
}

std::size_t Model::weight_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers) n += l.weights.data.size();
    return n;
}

std::size_t Model::nonzero_weight_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers) n += static_cast<std::size_t>(std::count_if(l.weights.data.begin(), l.weights.data.end(), [](double w) { return w != 0.0; }));
    return n;
}

void Model::validate() const {
    if (layers.empty()) throw ValidationError("model has no layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const Layer& layer = layers[l];
        if (layer.bias.size() != layer.outputs() || layer.weights.data.size() != layer.inputs() * layer.outputs()) {
            throw ValidationError("layer " + std::to_string(l) + " has inconsistent shapes");
        }
        if (l > 0 && layers[l - 1].outputs() != layer.inputs()) {
            throw ValidationError("layer " + std::to_string(l) + " input size does not chain");
        }
        if (layer.has_prune_set() && layer.prune_flags.size() != layer.weights.data.size()) {
            throw ValidationError("layer " + std::to_string(l) + " prune set has the wrong size");
        }
    }
}

Model make_model(std::span<const std::size_t> sizes, std::uint64_t seed) {
    if (sizes.size() < 2) throw UsageError("architecture needs at least an input and an output size");
    Rng rng(seed);
    Model model;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        if (sizes[l] == 0 || sizes[l + 1] == 0) throw UsageError("layer sizes must be positive");
        Layer layer;
        layer.weights = Matrix(sizes[l], sizes[l + 1]);
        layer.bias.assign(sizes[l + 1], 0.0);
        const double limit = std::sqrt(6.0 / static_cast<double>(sizes[l] + sizes[l + 1]));
        for (double& w : layer.weights.data) w = rng.uniform(-limit, limit);
        model.layers.push_back(std::move(layer));
    }
    return model;
}

std::string to_string(RegKind kind) { return kind == RegKind::L1 ? "L1" : "L2"; }

std::string to_string(Phase phase) {
    switch (phase) {
        case Phase::Train: return "train";
        case Phase::Regularize: return "regularize";
        case Phase::Retrain: return "retrain";
    }
    return "unknown";
}

RegKind parse_reg_kind(std::string_view text) {
    if (text == "L1" || text == "l1") return RegKind::L1;
    if (text == "L2" || text == "l2") return RegKind::L2;
    throw UsageError("regularizer must be L1 or L2, got '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
    if (!(reg_strength >= 0.0)) throw ValidationError("regularization strength must be non-negative");
    if (batch_size < 1) throw ValidationError("batch size must be at least 1");
}

namespace {

void softmax_inplace(std::vector<double>& v) {
    const double peak = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double& x : v) {
        x = std::exp(x - peak);
        sum += x;
    }
    for (double& x : v) x /= sum;
}

// -log softmax(z)[label] computed from the logits for accuracy near p = 1.
double cross_entropy(const std::vector<double>& logits, int label) {
    const double peak = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double x : logits) sum += std::exp(x - peak);
    return std::log(sum) + peak - logits[static_cast<std::size_t>(label)];
}

double regularizer(const Model& model, const TrainConfig& config, std::size_t m) {
    if (config.reg_strength == 0.0) return 0.0;
    double sum = 0.0;
    for (const Layer& layer : model.layers) {
        if (!layer.has_prune_set()) continue;
        for (std::size_t i = 0; i < layer.weights.data.size(); ++i) {
            if (!layer.prune_flags[i]) continue;
            const double w = layer.weights.data[i];
            sum += config.reg_kind == RegKind::L2 ? w * w : std::abs(w);
        }
    }
    const double md = static_cast<double>(m);
    return config.reg_kind == RegKind::L2 ? config.reg_strength / (2.0 * md) * sum : config.reg_strength / md * sum;
}

double sign(double w) { return w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0); }

}  // namespace

Activations forward(const Model& model, std::span<const double> x) {
    if (model.layers.empty() || x.size() != model.layers.front().inputs()) {
        throw ValidationError("input length does not match the first layer");
    }
    Activations act;
    act.a.reserve(model.layers.size() + 1);
    act.a.emplace_back(x.begin(), x.end());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const Layer& layer = model.layers[l];
        const std::vector<double>& in = act.a.back();
        if (in.size() != layer.inputs()) throw ValidationError("layer dimensions do not chain");
        std::vector<double> z = layer.bias;
        for (std::size_t r = 0; r < layer.inputs(); ++r) {
            if (in[r] != 0.0) simd::axpy(in[r], layer.weights.row(r), z);
        }
        std::vector<double> a = z;
        if (l + 1 < model.layers.size()) {
            simd::relu(a);
        } else {
            softmax_inplace(a);
        }
        act.z.push_back(std::move(z));
        act.a.push_back(std::move(a));
    }
    return act;
}

double loss(const Model& model, const Dataset& data, std::span<const std::size_t> batch, const TrainConfig& config) {
    if (batch.empty()) throw ValidationError("loss over an empty batch");
    double ce = 0.0;
    for (std::size_t idx : batch) {
        const Activations act = forward(model, data.sample(idx));
        ce += cross_entropy(act.z.back(), data.labels[idx]);
    }
    return ce / static_cast<double>(batch.size()) + regularizer(model, config, batch.size());
}

Gradients data_gradients(const Model& model, const Dataset& data, std::span<const std::size_t> batch) {
    if (batch.empty()) throw ValidationError("gradient over an empty batch");
    const std::size_t n_layers = model.layers.size();
    Gradients g;
    for (const Layer& layer : model.layers) {
        g.weights.emplace_back(layer.inputs(), layer.outputs());
        g.bias.emplace_back(layer.outputs(), 0.0);
    }

    std::vector<double> delta, prev;
    for (std::size_t idx : batch) {
        const Activations act = forward(model, data.sample(idx));
        delta = act.a.back();
        delta[static_cast<std::size_t>(data.labels[idx])] -= 1.0;
        for (std::size_t l = n_layers; l-- > 0;) {
            const Layer& layer = model.layers[l];
            const std::vector<double>& in = act.a[l];
            for (std::size_t r = 0; r < layer.inputs(); ++r) {
                if (in[r] != 0.0) simd::axpy(in[r], std::span<const double>(delta), g.weights[l].row(r));
            }
            for (std::size_t c = 0; c < layer.outputs(); ++c) g.bias[l][c] += delta[c];
            if (l == 0) break;
            prev.assign(layer.inputs(), 0.0);
            const std::vector<double>& z_prev = act.z[l - 1];
            for (std::size_t r = 0; r < layer.inputs(); ++r) {
                if (z_prev[r] > 0.0) prev[r] = simd::dot(layer.weights.row(r), delta);
            }
            delta.swap(prev);
        }
    }
    const double scale = 1.0 / static_cast<double>(batch.size());
    for (auto& m : g.weights) {
        for (double& v : m.data) v *= scale;
    }
    for (auto& b : g.bias) {
        for (double& v : b) v *= scale;
    }
    return g;
}

Gradients update_direction(const Model& model, const Dataset& data, std::span<const std::size_t> batch,
                           const TrainConfig& config, Phase phase) {
    Gradients g = data_gradients(model, data, batch);
    if (phase == Phase::Train) return g;
    const double m = static_cast<double>(batch.size());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const Layer& layer = model.layers[l];
        if (!layer.has_prune_set()) continue;
        for (std::size_t i = 0; i < layer.weights.data.size(); ++i) {
            if (!layer.prune_flags[i]) continue;
            double& d = g.weights[l].data[i];
            if (phase == Phase::Retrain) {
                d = 0.0;
            } else {
                const double w = layer.weights.data[i];
                d = config.reg_kind == RegKind::L2 ? config.reg_strength / m * w : config.reg_strength / m * sign(w);
            }
        }
    }
    return g;
}

void sgd_step(Model& model, const Dataset& data, std::span<const std::size_t> batch, const TrainConfig& config,
              Phase phase) {
    config.validate();
    const double m = static_cast<double>(batch.size());
    const double decay = config.learning_rate * config.reg_strength / m;
    if (phase == Phase::Regularize && decay >= 1.0) {
        throw ValidationError("beta * lambda / m = " + std::to_string(decay) + " >= 1 would flip weight signs");
    }
    const Gradients g = data_gradients(model, data, batch);
    const double beta = config.learning_rate;

    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        Layer& layer = model.layers[l];
        std::vector<double>& w = layer.weights.data;
        const std::vector<double>& dw = g.weights[l].data;
        const bool masked = phase != Phase::Train && layer.has_prune_set();
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (masked && layer.prune_flags[i]) {
                if (phase == Phase::Retrain) {
                    w[i] = 0.0;
                } else if (config.reg_kind == RegKind::L2) {
                    w[i] = w[i] * (1.0 - decay);
                } else {
                    w[i] = std::abs(w[i]) <= decay ? 0.0 : w[i] - decay * sign(w[i]);
                }
            } else {
                w[i] -= beta * dw[i];
            }
        }
        for (std::size_t c = 0; c < layer.bias.size(); ++c) layer.bias[c] -= beta * g.bias[l][c];
    }
}

void run_epoch(Model& model, const Dataset& data, const TrainConfig& config, Phase phase, std::uint64_t epoch_salt) {
    if (data.empty()) throw ValidationError("training on an empty dataset");
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(config.seed * 0x9E3779B97F4A7C15ull + epoch_salt);
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
        const std::size_t len = std::min(config.batch_size, order.size() - start);
        sgd_step(model, data, std::span<const std::size_t>(order).subspan(start, len), config, phase);
    }
}

void prune(Model& model) {
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        Layer& layer = model.layers[l];
        if (!layer.mask) throw ValidationError("prune: layer " + std::to_string(l) + " has no mask");
        for (std::size_t i = 0; i < layer.weights.data.size(); ++i) {
            if (layer.prune_flags[i]) layer.weights.data[i] = 0.0;
        }
    }
}

double evaluate(const Model& model, const Dataset& data) {
    if (data.empty()) throw ValidationError("evaluate: empty split");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Activations act = forward(model, data.sample(i));
        const auto out = act.output();
        const auto best = static_cast<int>(std::max_element(out.begin(), out.end()) - out.begin());
        if (best == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

double mean_abs_prune_set_weight(const Model& model) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const Layer& layer : model.layers) {
        if (!layer.has_prune_set()) continue;
        for (std::size_t i = 0; i < layer.weights.data.size(); ++i) {
            if (!layer.prune_flags[i]) continue;
            sum += std::abs(layer.weights.data[i]);
            ++n;
        }
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

void magnitude_prune_baseline(Model& model, const Dataset& train, const TrainConfig& config, double target_sparsity,
                              std::size_t iterations, std::size_t retrain_epochs) {
    if (!(target_sparsity >= 0.0 && target_sparsity < 1.0)) throw ValidationError("sparsity must be in [0, 1)");
    if (target_sparsity == 0.0 || iterations == 0) return;
    for (Layer& layer : model.layers) {
        layer.mask.reset();
        layer.prune_flags.assign(layer.weights.data.size(), 0);
    }
    std::vector<std::size_t> order;
    for (std::size_t it = 1; it <= iterations; ++it) {
        const double level = target_sparsity * static_cast<double>(it) / static_cast<double>(iterations);
        for (Layer& layer : model.layers) {
            const std::vector<double>& w = layer.weights.data;
            const auto n_prune = static_cast<std::size_t>(std::llround(level * static_cast<double>(w.size())));
            order.resize(w.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            // Ties broken by position so the threshold cut is deterministic.
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return std::abs(w[a]) < std::abs(w[b]); });
            for (std::size_t k = 0; k < n_prune; ++k) {
                layer.prune_flags[order[k]] = 1;
                layer.weights.data[order[k]] = 0.0;
            }
        }
        for (std::size_t e = 0; e < retrain_epochs; ++e) {
            run_epoch(model, train, config, Phase::Retrain, 0x4D41470000ull + it * 1000 + e);
        }
    }
}

double compression_rate(std::size_t dense_weights, std::size_t kept_weights) {
    if (kept_weights == 0) throw ValidationError("compression rate with no kept weights");
    return static_cast<double>(dense_weights) / static_cast<double>(kept_weights);
}

namespace {

double model_sparsity(const Model& model) {
    return 1.0 - static_cast<double>(model.nonzero_weight_count()) / static_cast<double>(model.weight_count());
}

StageRow make_row(const std::string& stage, std::size_t epoch, const Model& model, const DataSplit& data) {
    return {stage, epoch, evaluate(model, data.train), evaluate(model, data.test), model_sparsity(model),
            mean_abs_prune_set_weight(model)};
}

}  // namespace

PipelineResult prune_and_retrain(const DataSplit& data, Model dense, const TrainConfig& config, double sparsity,
                                 std::uint32_t mask_seed) {
    config.validate();
    dense.validate();
    PipelineResult result;
    PipelineReport& rep = result.report;
    rep.sparsity_target = sparsity;
    rep.dense_train_acc = evaluate(dense, data.train);
    rep.dense_test_acc = evaluate(dense, data.test);

    Model model = dense;
    std::size_t kept = 0;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        Layer& layer = model.layers[l];
        const auto rows = static_cast<std::uint32_t>(layer.inputs());
        const auto cols = static_cast<std::uint32_t>(layer.outputs());
        const auto specs = default_mask_specs(rows, cols, mask_seed + static_cast<std::uint32_t>(l));
        layer.attach_mask(generate_mask(rows, cols, sparsity, specs.first, specs.second));
        kept += layer.mask->kept().size();
        rep.mask_specs.push_back(specs);
    }
    rep.compression_rate = compression_rate(model.weight_count(), kept);

    for (std::size_t e = 0; e < config.regularize_epochs; ++e) {
        run_epoch(model, data.train, config, Phase::Regularize, 0x5245470000ull + e);
        rep.rows.push_back(make_row("regularize", e + 1, model, data));
    }
    rep.regularized_test_acc = evaluate(model, data.test);
    rep.mean_abs_pruneset_after_regularize = mean_abs_prune_set_weight(model);

    prune(model);
    rep.rows.push_back(make_row("prune", 0, model, data));
    rep.pruned_test_acc = rep.rows.back().test_acc;

    for (std::size_t e = 0; e < config.retrain_epochs; ++e) {
        run_epoch(model, data.train, config, Phase::Retrain, 0x5254520000ull + e);
        rep.rows.push_back(make_row("retrain", e + 1, model, data));
    }
    rep.retrained_train_acc = evaluate(model, data.train);
    rep.retrained_test_acc = evaluate(model, data.test);
    for (const Layer& layer : model.layers) rep.layer_sparsity.push_back(layer.sparsity());

    result.dense = std::move(dense);
    result.pruned = std::move(model);
    return result;
}

PipelineResult run_pipeline(const DataSplit& data, std::span<const std::size_t> architecture,
                            const TrainConfig& config, double sparsity, std::uint32_t mask_seed) {
    config.validate();
    data.train.validate();
    data.test.validate();
    if (architecture.empty() || architecture.front() != data.train.n_features ||
        architecture.back() != data.train.n_classes) {
        throw ValidationError("architecture does not match the dataset's features and classes");
    }
    Model model = make_model(architecture, config.seed);
    std::vector<StageRow> train_rows;
    for (std::size_t e = 0; e < config.train_epochs; ++e) {
        run_epoch(model, data.train, config, Phase::Train, 0x5452410000ull + e);
        train_rows.push_back(make_row("train", e + 1, model, data));
    }
    PipelineResult result = prune_and_retrain(data, std::move(model), config, sparsity, mask_seed);
    result.report.rows.insert(result.report.rows.begin(), train_rows.begin(), train_rows.end());
    return result;
}

std::string pipeline_csv_header() { return "stage,epoch,train_acc,test_acc,sparsity,mean_abs_pruneset_weight"; }

std::string to_csv(const StageRow& row) {
    std::ostringstream out;
    out.precision(6);
    out << row.stage << ',' << row.epoch << ',' << row.train_acc << ',' << row.test_acc << ',' << row.sparsity << ','
        << row.mean_abs_pruneset_weight;
    return out.str();
}

std::string to_json(const PipelineReport& report) {
    nlohmann::ordered_json j;
    j["sparsity_target"] = report.sparsity_target;
    j["dense_train_acc"] = report.dense_train_acc;
    j["dense_test_acc"] = report.dense_test_acc;
    j["regularized_test_acc"] = report.regularized_test_acc;
    j["pruned_test_acc"] = report.pruned_test_acc;
    j["retrained_train_acc"] = report.retrained_train_acc;
    j["retrained_test_acc"] = report.retrained_test_acc;
    j["mean_abs_pruneset_after_regularize"] = report.mean_abs_pruneset_after_regularize;
    j["compression_rate"] = report.compression_rate;
    j["layer_sparsity"] = report.layer_sparsity;
    auto& masks = j["masks"] = nlohmann::ordered_json::array();
    for (const auto& [row, col] : report.mask_specs) masks.push_back({{"row", to_string(row)}, {"col", to_string(col)}});
    return j.dump(2);
}

}  // namespace lfsrprune::tinynet
