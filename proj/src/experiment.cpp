#include "lfsrprune/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lfsrprune/error.hpp"
#include "lfsrprune/random.hpp"
#include "lfsrprune/rank.hpp"

namespace lfsrprune {

DataSplit load_data_source(const std::string& source, std::uint64_t seed) {
    if (source == "synthetic") return gen_synthetic_split(seed, 600, 300, 8, 3);
    if (source.starts_with("mnist:")) return load_mnist(source.substr(6));
    throw UsageError("dataset must be 'synthetic' or 'mnist:<dir>', got '" + source + "'");
}

LayerShape parse_shape(std::string_view text) {
    const auto x = text.find('x');
    LayerShape s;
    auto parse = [&](std::string_view part, std::uint32_t& out) {
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        if (part.empty() || ec != std::errc{} || p != part.data() + part.size() || out == 0) {
            throw UsageError("bad layer shape '" + std::string(text) + "' (expected ROWSxCOLS)");
        }
    };
    if (x == std::string_view::npos) throw UsageError("bad layer shape '" + std::string(text) + "' (expected ROWSxCOLS)");
    parse(text.substr(0, x), s.rows);
    parse(text.substr(x + 1), s.cols);
    return s;
}

SyntheticSparseLayer make_sparse_layer(LayerShape shape, double sparsity, std::uint32_t seed) {
    const auto specs = default_mask_specs(shape.rows, shape.cols, seed);
    Mask mask = generate_mask(shape.rows, shape.cols, sparsity, specs.first, specs.second);
    DenseLayer dense{shape.rows, shape.cols, std::vector<float>(std::size_t{shape.rows} * shape.cols, 0.0f),
                     std::vector<float>(shape.cols, 0.0f)};
    Rng rng(seed * 7919ull + shape.rows * 31ull + shape.cols);
    for (const Position& p : mask.kept()) {
        const double magnitude = rng.uniform(0.1, 1.0);
        dense.weights[std::size_t{p.row} * shape.cols + p.col] =
            static_cast<float>(rng.uniform() < 0.5 ? -magnitude : magnitude);
    }
    for (float& b : dense.bias) b = static_cast<float>(rng.uniform(-0.1, 0.1));
    return {std::move(dense), std::move(mask)};
}

CostPoint evaluate_design(const SyntheticSparseLayer& layer, unsigned index_bits, const CostTable& table,
                          double sparsity) {
    const LfsrSparseLayer proposed = encode_lfsr(layer.dense, layer.mask, ValueBits::Q8);
    const BaselineCompressed baseline = encode_baseline(layer.dense, index_bits, ValueBits::Q8);

    // Traces do not depend on the input values.
    const std::vector<std::int8_t> x(layer.dense.rows, 1);
    const std::vector<std::int32_t> bias(layer.dense.cols, 0);
    const AccessTrace tp = lfsr_sparse_matvec_q8(proposed, bias, x).trace;
    const AccessTrace tb = baseline_sparse_matvec_q8(baseline, bias, x).trace;

    CostPoint point;
    point.shape = LayerShape{layer.dense.rows, layer.dense.cols}.name();
    point.sparsity = sparsity;
    point.index_bits = index_bits;
    point.alpha = baseline.alpha();
    point.report = compare({tp, footprint(proposed).total()}, {tb, footprint(baseline).total()}, table);
    return point;
}

std::vector<CostPoint> design_grid(const std::vector<LayerShape>& shapes, const std::vector<double>& sparsities,
                                   const std::vector<unsigned>& index_bits, const CostTable& table,
                                   std::uint32_t seed) {
    std::vector<CostPoint> out;
    for (const LayerShape& shape : shapes) {
        for (double sp : sparsities) {
            const SyntheticSparseLayer layer = make_sparse_layer(shape, sp, seed);
            for (unsigned bits : index_bits) out.push_back(evaluate_design(layer, bits, table, sp));
        }
    }
    return out;
}

RankTrial rank_trial(std::uint32_t rows, std::uint32_t cols, double sparsity, std::uint32_t seed) {
    Rng rng(0xA11CE000ull + seed);
    std::vector<double> m(std::size_t{rows} * cols);
    for (double& v : m) v = rng.normal();
    RankTrial t;
    t.dense_rank = numerical_rank(m, rows, cols);
    const auto specs = default_mask_specs(rows, cols, seed);
    const Mask mask = generate_mask(rows, cols, sparsity, specs.first, specs.second);
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!mask.kept_flags()[i]) m[i] = 0.0;
    }
    t.masked_rank = numerical_rank(m, rows, cols);
    return t;
}

namespace {

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Sums counters and keeps the word widths of the latest trace.
void accumulate(AccessTrace& total, const AccessTrace& t) {
    total += t;
    total.value_bits = t.value_bits;
    total.index_bits = t.index_bits;
}

struct Q8Weights {
    DenseQ8Layer dense;  // for dense layers only
    float scale = 1.0f;
};

}  // namespace

InferenceResult infer(const StoredModel& model, const Dataset& data, bool int8_mode) {
    if (model.layers.empty()) throw ValidationError("model has no layers");
    if (data.empty()) throw ValidationError("inference over an empty dataset");
    if (rows_of(model.layers.front()) != data.n_features) {
        throw ValidationError("model input size does not match the dataset");
    }

    // Per-layer 8-bit views, prepared once.
    std::vector<Q8Weights> q8(model.layers.size());
    if (int8_mode) {
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            const StoredLayer& s = model.layers[l];
            if (const auto* d = std::get_if<DenseLayer>(&s)) {
                q8[l].scale = q8_scale(d->weights);
                q8[l].dense = {d->rows, d->cols, std::vector<std::int8_t>(d->weights.size()), q8[l].scale};
                for (std::size_t i = 0; i < d->weights.size(); ++i) {
                    q8[l].dense.weights[i] = quantize_q8(d->weights[i], q8[l].scale);
                }
            } else if (const auto* sp = std::get_if<LfsrSparseLayer>(&s)) {
                if (sp->values.bits != ValueBits::Q8) throw UsageError("8-bit inference needs 8-bit LFSR layers");
                q8[l].scale = sp->values.scale;
            } else {
                const auto& c = std::get<BaselineCompressed>(s);
                if (c.S.bits != ValueBits::Q8) throw UsageError("8-bit inference needs 8-bit baseline layers");
                q8[l].scale = c.S.scale;
            }
        }
    }

    InferenceResult result;
    result.layer_traces.resize(model.layers.size());
    std::size_t correct = 0;
    std::vector<float> x;
    std::vector<std::int8_t> xq;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto sample = data.sample(i);
        x.assign(sample.begin(), sample.end());
        std::vector<double> y;
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            const StoredLayer& s = model.layers[l];
            const Activation act = l + 1 < model.layers.size() ? Activation::Relu : Activation::Identity;
            if (!int8_mode) {
                MatvecResult<double> r;
                if (const auto* d = std::get_if<DenseLayer>(&s)) {
                    r = dense_matvec(*d, x, act);
                } else if (const auto* sp = std::get_if<LfsrSparseLayer>(&s)) {
                    r = lfsr_sparse_matvec(*sp, x, act);
                } else {
                    const auto& c = std::get<BaselineCompressed>(s);
                    r = baseline_sparse_matvec(c, c.bias, x, act);
                }
                y = std::move(r.y);
                accumulate(result.layer_traces[l], r.trace);
            } else {
                const float x_scale = quantize_activations(x, xq);
                MatvecResult<std::int32_t> r;
                if (const auto* d = std::get_if<DenseLayer>(&s)) {
                    r = dense_matvec_q8(q8[l].dense, quantize_bias(d->bias, q8[l].scale, x_scale), xq, act);
                } else if (const auto* sp = std::get_if<LfsrSparseLayer>(&s)) {
                    r = lfsr_sparse_matvec_q8(*sp, quantize_bias(sp->bias, q8[l].scale, x_scale), xq, act);
                } else {
                    const auto& c = std::get<BaselineCompressed>(s);
                    r = baseline_sparse_matvec_q8(c, quantize_bias(c.bias, q8[l].scale, x_scale), xq, act);
                }
                const double unit = static_cast<double>(q8[l].scale) * x_scale;
                y.resize(r.y.size());
                for (std::size_t k = 0; k < r.y.size(); ++k) y[k] = r.y[k] * unit;
                accumulate(result.layer_traces[l], r.trace);
            }
            x.assign(y.begin(), y.end());
        }
        if (argmax(y) == static_cast<std::size_t>(data.labels[i])) ++correct;
    }
    result.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
    return result;
}

void ExperimentConfig::validate() const {
    if (architecture.size() < 2) throw UsageError("architecture needs at least two sizes");
    if (sparsities.empty() || lambdas.empty() || reg_kinds.empty() || index_bits.empty() || seeds.empty()) {
        throw UsageError("every sweep list must be non-empty");
    }
    for (double sp : sparsities) {
        if (!(sp >= 0.0 && sp < 1.0)) throw UsageError("sparsity must be in [0, 1)");
    }
    for (double l : lambdas) {
        if (!(l >= 0.0)) throw UsageError("lambda must be >= 0");
    }
    for (unsigned b : index_bits) {
        if (b != 4 && b != 8) throw UsageError("index bits must be 4 or 8");
    }
    train.validate();
}

std::string sweep_csv_header() {
    return "run,sparsity,lambda,reg,seed,dense_test_acc,regularized_test_acc,pruned_test_acc,retrained_test_acc,"
           "mean_abs_pruneset_weight,compression_rate,magnitude_test_acc,mask_specs";
}

std::string to_csv(const SweepRow& r) {
    std::ostringstream out;
    out.precision(6);
    out << r.run << ',' << r.sparsity << ',' << r.lambda << ',' << tinynet::to_string(r.reg_kind) << ',' << r.seed
        << ',' << r.report.dense_test_acc << ',' << r.report.regularized_test_acc << ',' << r.report.pruned_test_acc
        << ',' << r.report.retrained_test_acc << ',' << r.report.mean_abs_pruneset_after_regularize << ','
        << r.report.compression_rate << ',' << r.magnitude_test_acc << ",\"";
    for (std::size_t l = 0; l < r.report.mask_specs.size(); ++l) {
        if (l) out << ';';
        out << to_string(r.report.mask_specs[l].first) << '|' << to_string(r.report.mask_specs[l].second);
    }
    out << '"';
    return out.str();
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    out << text;
}

std::string arch_name(const std::vector<std::size_t>& arch) {
    std::string s;
    for (std::size_t i = 0; i < arch.size(); ++i) s += (i ? "-" : "") + std::to_string(arch[i]);
    return s;
}

CostPoint model_cost(const tinynet::Model& model, const std::string& name, double sparsity, unsigned index_bits,
                     const CostTable& table) {
    AccessTrace tp, tb;
    std::uint64_t bits_p = 0, bits_b = 0, stored = 0, nnz = 0;
    for (const tinynet::Layer& layer : model.layers) {
        const DenseLayer dense = to_dense_layer(layer);
        const LfsrSparseLayer p = encode_lfsr(dense, *layer.mask, ValueBits::Q8);
        const BaselineCompressed b = encode_baseline(dense, index_bits, ValueBits::Q8);
        const std::vector<std::int8_t> x(dense.rows, 1);
        const std::vector<std::int32_t> bias(dense.cols, 0);
        AccessTrace lp = lfsr_sparse_matvec_q8(p, bias, x).trace;
        AccessTrace lb = baseline_sparse_matvec_q8(b, bias, x).trace;
        accumulate(tp, lp);
        accumulate(tb, lb);
        bits_p += footprint(p).total();
        bits_b += footprint(b).total();
        stored += b.S.size();
        nnz += b.nnz;
    }
    CostPoint point;
    point.shape = name;
    point.sparsity = sparsity;
    point.index_bits = index_bits;
    point.alpha = nnz == 0 ? 1.0 : static_cast<double>(stored) / static_cast<double>(nnz);
    point.report = compare({tp, bits_p}, {tb, bits_b}, table);
    return point;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config, const CostTable& table) {
    config.validate();
    const bool write = !config.output_dir.empty();
    if (write) std::filesystem::create_directories(config.output_dir);
    const auto dir = config.output_dir;

    std::ofstream runs_csv, costs_csv;
    if (write) {
        runs_csv.open(dir / "runs.csv", std::ios::trunc);
        costs_csv.open(dir / "costs.csv", std::ios::trunc);
        if (!runs_csv || !costs_csv) throw FormatError("cannot write into " + dir.string());
        runs_csv << sweep_csv_header() << '\n' << std::flush;
        costs_csv << cost_csv_header() << '\n' << std::flush;
    }

    SweepResult result;
    std::size_t run = 0;
    for (std::uint64_t seed : config.seeds) {
        const DataSplit data = load_data_source(config.dataset, seed);
        if (config.architecture.front() != data.train.n_features ||
            config.architecture.back() != data.train.n_classes) {
            throw UsageError("architecture " + arch_name(config.architecture) + " does not fit dataset '" +
                             config.dataset + "'");
        }
        // One dense model per seed, shared by every sparsity / lambda point.
        tinynet::TrainConfig base = config.train;
        base.seed = seed;
        tinynet::Model dense = tinynet::make_model(config.architecture, seed);
        std::vector<tinynet::StageRow> train_rows;
        for (std::size_t e = 0; e < base.train_epochs; ++e) {
            tinynet::run_epoch(dense, data.train, base, tinynet::Phase::Train, 0x5452410000ull + e);
            train_rows.push_back({"train", e + 1, tinynet::evaluate(dense, data.train),
                                  tinynet::evaluate(dense, data.test), 0.0, 0.0});
        }

        for (double sp : config.sparsities) {
            double magnitude_acc = -1.0;
            if (config.magnitude_iterations > 0) {
                tinynet::Model m = dense;
                tinynet::magnitude_prune_baseline(m, data.train, base, sp, config.magnitude_iterations,
                                                  config.magnitude_retrain_epochs);
                magnitude_acc = tinynet::evaluate(m, data.test);
            }
            for (tinynet::RegKind kind : config.reg_kinds) {
                for (double lambda : config.lambdas) {
                    tinynet::TrainConfig tc = base;
                    tc.reg_kind = kind;
                    tc.reg_strength = lambda;
                    tinynet::PipelineResult pr =
                        tinynet::prune_and_retrain(data, dense, tc, sp, static_cast<std::uint32_t>(seed));
                    pr.report.rows.insert(pr.report.rows.begin(), train_rows.begin(), train_rows.end());

                    SweepRow row{++run, sp, lambda, kind, seed, pr.report, magnitude_acc};
                    std::vector<CostPoint> costs;
                    for (unsigned bits : config.index_bits) {
                        costs.push_back(model_cost(pr.pruned, arch_name(config.architecture), sp, bits, table));
                    }
                    if (write) {
                        std::ostringstream stages;
                        stages << tinynet::pipeline_csv_header() << '\n';
                        for (const auto& r : pr.report.rows) stages << tinynet::to_csv(r) << '\n';
                        write_text(dir / ("run_" + std::to_string(row.run) + "_stages.csv"), stages.str());
                        write_text(dir / ("run_" + std::to_string(row.run) + ".json"), tinynet::to_json(pr.report) + "\n");
                        runs_csv << to_csv(row) << '\n' << std::flush;
                        for (const CostPoint& c : costs) costs_csv << to_csv(c) << '\n';
                        costs_csv << std::flush;
                    }
                    result.runs.push_back(std::move(row));
                    result.costs.insert(result.costs.end(), costs.begin(), costs.end());
                }
            }
        }
    }

    if (write) {
        write_text(dir / "cost_table.txt", to_text(table) + "\n" + format_cost_table(result.costs));
        std::ostringstream summary;
        summary << "architecture " << arch_name(config.architecture) << ", dataset " << config.dataset << ", "
                << result.runs.size() << " runs\n";
        summary << sweep_csv_header() << '\n';
        for (const SweepRow& r : result.runs) summary << to_csv(r) << '\n';
        write_text(dir / "summary.txt", summary.str());
    }
    return result;
}

}  // namespace lfsrprune
