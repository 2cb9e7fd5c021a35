// lfsrprune: command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data/format error,
// 3 numeric/validation failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lfsrprune/container.hpp"
#include "lfsrprune/cost_model.hpp"
#include "lfsrprune/error.hpp"
#include "lfsrprune/experiment.hpp"
#include "lfsrprune/kernels.hpp"
#include "lfsrprune/lfsr.hpp"
#include "lfsrprune/mask.hpp"
#include "lfsrprune/simd.hpp"
#include "lfsrprune/tinynet.hpp"

using namespace lfsrprune;
namespace fs = std::filesystem;

namespace {

struct DataOptions {
    std::string source = "synthetic";
    std::uint64_t seed = 1;
};

void add_data_options(CLI::App* cmd, DataOptions& o) {
    cmd->add_option("--dataset", o.source, "synthetic | mnist:<dir>")->capture_default_str();
    cmd->add_option("--data-seed", o.seed, "Seed for the synthetic dataset")->capture_default_str();
}

void add_train_options(CLI::App* cmd, tinynet::TrainConfig& c) {
    cmd->add_option("--lr", c.learning_rate, "Learning rate")->capture_default_str();
    cmd->add_option("--batch", c.batch_size, "Mini-batch size")->capture_default_str();
    cmd->add_option("--seed", c.seed, "Initialization and shuffling seed")->capture_default_str();
}

std::vector<std::size_t> parse_arch(const std::string& text) {
    std::vector<std::size_t> sizes;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, '-')) {
        try {
            std::size_t used = 0;
            const unsigned long v = std::stoul(part, &used);
            if (used != part.size() || v == 0) throw std::invalid_argument(part);
            sizes.push_back(v);
        } catch (const std::logic_error&) {
            throw UsageError("bad architecture '" + text + "' (expected e.g. 8-16-3)");
        }
    }
    if (sizes.size() < 2) throw UsageError("architecture needs at least two sizes");
    return sizes;
}

ValueBits parse_value_bits(unsigned bits) {
    if (bits == 8) return ValueBits::Q8;
    if (bits == 32) return ValueBits::F32;
    throw UsageError("value bits must be 8 or 32");
}

LayerKind parse_kind(const std::string& text) {
    if (text == "dense") return LayerKind::Dense;
    if (text == "lfsr") return LayerKind::LfsrSparse;
    if (text == "baseline") return LayerKind::Baseline;
    throw UsageError("format must be dense, lfsr or baseline");
}

const char* kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::Dense: return "dense";
        case LayerKind::LfsrSparse: return "lfsr";
        case LayerKind::Baseline: return "baseline";
    }
    return "?";
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    return out;
}

void save(const fs::path& path, const StoredModel& model) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    save_model(path, model);
}

void write_stages(const fs::path& path, const std::vector<tinynet::StageRow>& rows) {
    if (path.empty()) return;
    auto out = open_out(path);
    out << tinynet::pipeline_csv_header() << '\n';
    for (const auto& r : rows) out << tinynet::to_csv(r) << '\n';
}

tinynet::StageRow stage_row(const char* stage, std::size_t epoch, const tinynet::Model& m, const DataSplit& d) {
    double sparsity = 0.0;
    for (const auto& layer : m.layers) sparsity += layer.sparsity() * static_cast<double>(layer.weights.data.size());
    sparsity /= static_cast<double>(m.weight_count());
    return {stage, epoch, tinynet::evaluate(m, d.train), tinynet::evaluate(m, d.test), sparsity,
            tinynet::mean_abs_prune_set_weight(m)};
}

// --- lfsr -------------------------------------------------------------------

struct LfsrOptions {
    std::string spec;
    unsigned width = 4;
    std::uint32_t seed = 1;
    std::uint64_t count = 16;
    std::uint32_t index_range = 0;
};

int cmd_lfsr(const LfsrOptions& o) {
    const LfsrSpec spec = o.spec.empty() ? default_spec(o.width, o.seed) : parse_spec(o.spec);
    const std::uint64_t p = period(spec);
    std::cout << "# " << to_string(spec) << " period=" << p
              << " maximal=" << (p == (std::uint64_t{1} << spec.width) - 1 ? "yes" : "no") << '\n';
    std::cout << (o.index_range ? "step,state,index\n" : "step,state\n");
    Lfsr reg(spec);
    for (std::uint64_t k = 0; k < o.count; ++k) {
        const std::uint32_t s = reg.next();
        std::cout << k + 1 << ',' << s;
        if (o.index_range) std::cout << ',' << map_to_index(s, o.index_range, spec.width);
        std::cout << '\n';
    }
    validate_spec(spec);
    return 0;
}

// --- mask -------------------------------------------------------------------

struct MaskOptions {
    std::uint32_t rows = 0, cols = 0;
    double sparsity = 0.9;
    std::uint32_t seed = 1;
    std::string row_spec, col_spec;
    std::string out;
};

int cmd_mask(const MaskOptions& o) {
    auto specs = default_mask_specs(o.rows, o.cols, o.seed);
    if (!o.row_spec.empty()) specs.first = parse_spec(o.row_spec);
    if (!o.col_spec.empty()) specs.second = parse_spec(o.col_spec);
    const Mask mask = generate_mask(o.rows, o.cols, o.sparsity, specs.first, specs.second);
    const MaskStats st = mask_stats(mask);
    std::cerr << "row " << to_string(specs.first) << "  col " << to_string(specs.second) << '\n'
              << "kept " << mask.kept().size() << " of " << std::uint64_t{o.rows} * o.cols << ", sparsity "
              << st.achieved_sparsity << ", steps/kept " << st.steps_per_kept << ", row count cv " << st.row_cv
              << ", col count cv " << st.col_cv << '\n';
    std::ofstream file;
    if (!o.out.empty()) file = open_out(o.out);
    std::ostream& out = o.out.empty() ? std::cout : file;
    out << "order,row,col\n";
    for (std::size_t k = 0; k < mask.kept().size(); ++k) {
        out << k << ',' << mask.kept()[k].row << ',' << mask.kept()[k].col << '\n';
    }
    return 0;
}

// --- train / prune / retrain ------------------------------------------------

struct TrainOptions {
    DataOptions data;
    std::string arch = "8-16-3";
    tinynet::TrainConfig train;
    std::string out = "dense.lfsp";
    std::string log;
};

int cmd_train(const TrainOptions& o) {
    const DataSplit data = load_data_source(o.data.source, o.data.seed);
    const auto arch = parse_arch(o.arch);
    if (arch.front() != data.train.n_features || arch.back() != data.train.n_classes) {
        throw UsageError("architecture " + o.arch + " does not fit the dataset (" +
                         std::to_string(data.train.n_features) + " features, " +
                         std::to_string(data.train.n_classes) + " classes)");
    }
    o.train.validate();
    if (o.train.train_epochs == 0) throw UsageError("--epochs must be at least 1");
    tinynet::Model model = tinynet::make_model(arch, o.train.seed);
    std::vector<tinynet::StageRow> rows;
    for (std::size_t e = 0; e < o.train.train_epochs; ++e) {
        tinynet::run_epoch(model, data.train, o.train, tinynet::Phase::Train, 0x5452410000ull + e);
        rows.push_back(stage_row("train", e + 1, model, data));
    }
    save(o.out, export_model(model, LayerKind::Dense));
    write_stages(o.log, rows);
    std::cout << "train_acc," << rows.back().train_acc << "\ntest_acc," << rows.back().test_acc << '\n';
    return 0;
}

struct PruneOptions {
    DataOptions data;
    std::string model = "dense.lfsp";
    double sparsity = 0.7;
    std::string reg = "l2";
    std::uint32_t mask_seed = 1;
    tinynet::TrainConfig train;
    std::string out = "pruned.lfsp";
    std::string log;
};

int cmd_prune(PruneOptions o) {
    const DataSplit data = load_data_source(o.data.source, o.data.seed);
    o.train.reg_kind = tinynet::parse_reg_kind(o.reg);
    o.train.validate();
    tinynet::Model model = import_model(load_model(o.model));
    std::vector<tinynet::StageRow> rows;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        auto& layer = model.layers[l];
        const auto r = static_cast<std::uint32_t>(layer.inputs());
        const auto c = static_cast<std::uint32_t>(layer.outputs());
        const auto specs = default_mask_specs(r, c, o.mask_seed + static_cast<std::uint32_t>(l));
        layer.attach_mask(generate_mask(r, c, o.sparsity, specs.first, specs.second));
    }
    for (std::size_t e = 0; e < o.train.regularize_epochs; ++e) {
        tinynet::run_epoch(model, data.train, o.train, tinynet::Phase::Regularize, 0x5245470000ull + e);
        rows.push_back(stage_row("regularize", e + 1, model, data));
    }
    tinynet::prune(model);
    rows.push_back(stage_row("prune", 0, model, data));
    save(o.out, export_model(model, LayerKind::LfsrSparse));
    write_stages(o.log, rows);
    std::cout << "test_acc," << rows.back().test_acc << "\nsparsity," << rows.back().sparsity << '\n';
    return 0;
}

struct RetrainOptions {
    DataOptions data;
    std::string model = "pruned.lfsp";
    tinynet::TrainConfig train;
    std::string out = "retrained.lfsp";
    std::string log;
};

int cmd_retrain(const RetrainOptions& o) {
    const DataSplit data = load_data_source(o.data.source, o.data.seed);
    o.train.validate();
    const StoredModel stored = load_model(o.model);
    tinynet::Model model = import_model(stored);
    std::vector<tinynet::StageRow> rows;
    for (std::size_t e = 0; e < o.train.retrain_epochs; ++e) {
        tinynet::run_epoch(model, data.train, o.train, tinynet::Phase::Retrain, 0x5254520000ull + e);
        rows.push_back(stage_row("retrain", e + 1, model, data));
    }
    const bool all_lfsr = std::all_of(stored.layers.begin(), stored.layers.end(),
                                      [](const StoredLayer& l) { return kind_of(l) == LayerKind::LfsrSparse; });
    save(o.out, export_model(model, all_lfsr ? LayerKind::LfsrSparse : LayerKind::Baseline));
    write_stages(o.log, rows);
    if (!rows.empty()) std::cout << "test_acc," << rows.back().test_acc << '\n';
    return 0;
}

// --- encode / infer -----------------------------------------------------------

struct EncodeOptions {
    std::string model;
    std::string format = "lfsr";
    unsigned value_bits = 32;
    unsigned index_bits = 4;
    std::string out;
};

int cmd_encode(const EncodeOptions& o) {
    if (o.index_bits != 4 && o.index_bits != 8) throw UsageError("index bits must be 4 or 8");
    const StoredModel in = load_model(o.model);
    const StoredModel out =
        export_model(import_model(in), parse_kind(o.format), parse_value_bits(o.value_bits), o.index_bits);
    save(o.out, out);
    std::cout << "layer,kind,rows,cols,bits\n";
    for (std::size_t l = 0; l < out.layers.size(); ++l) {
        const StoredLayer& s = out.layers[l];
        std::uint64_t bits = 0;
        if (const auto* d = std::get_if<DenseLayer>(&s)) bits = std::uint64_t{32} * d->weights.size();
        if (const auto* p = std::get_if<LfsrSparseLayer>(&s)) bits = footprint(*p).total();
        if (const auto* b = std::get_if<BaselineCompressed>(&s)) bits = footprint(*b).total();
        std::cout << l << ',' << kind_name(kind_of(s)) << ',' << rows_of(s) << ',' << cols_of(s) << ',' << bits
                  << '\n';
    }
    return 0;
}

struct InferOptions {
    DataOptions data;
    std::string model;
    bool int8 = false;
    std::string trace;
};

int cmd_infer(const InferOptions& o) {
    const DataSplit data = load_data_source(o.data.source, o.data.seed);
    const StoredModel model = load_model(o.model);
    const InferenceResult r = infer(model, data.test, o.int8);
    std::cout << "accuracy," << r.accuracy << "\nisa," << simd::isa_name(simd::active_isa()) << '\n';
    if (!o.trace.empty()) {
        auto out = open_out(o.trace);
        out << "layer,kind," << trace_csv_header() << '\n';
        for (std::size_t l = 0; l < r.layer_traces.size(); ++l) {
            out << l << ',' << kind_name(kind_of(model.layers[l])) << ',' << to_csv(r.layer_traces[l]) << '\n';
        }
    }
    return 0;
}

// --- footprint / simulate / rank -------------------------------------------

struct GridOptions {
    std::vector<std::string> shapes = {"300x100", "400x120", "2048x2048"};
    std::vector<double> sparsities = {0.4, 0.7, 0.95};
    std::vector<unsigned> index_bits = {4, 8};
    std::uint32_t seed = 1;
    std::string cost_table;
    std::string out;
};

void add_grid_options(CLI::App* cmd, GridOptions& o) {
    cmd->add_option("--shapes", o.shapes, "Layer shapes ROWSxCOLS")->capture_default_str()->delimiter(',');
    cmd->add_option("--sparsities", o.sparsities, "Sparsity levels")->capture_default_str()->delimiter(',');
    cmd->add_option("--index-bits", o.index_bits, "Baseline relative-index widths (4|8)")
        ->capture_default_str()
        ->delimiter(',');
    cmd->add_option("--seed", o.seed, "Mask and weight seed")->capture_default_str();
}

CostTable grid_table(const GridOptions& o) {
    return o.cost_table.empty() ? CostTable{} : load_cost_table(o.cost_table);
}

std::vector<CostPoint> run_grid(const GridOptions& o) {
    std::vector<LayerShape> shapes;
    for (const auto& s : o.shapes) shapes.push_back(parse_shape(s));
    for (unsigned b : o.index_bits) {
        if (b != 4 && b != 8) throw UsageError("index bits must be 4 or 8");
    }
    for (double sp : o.sparsities) {
        if (!(sp >= 0.0 && sp < 1.0)) throw UsageError("sparsity must be in [0, 1)");
    }
    return design_grid(shapes, o.sparsities, o.index_bits, grid_table(o), o.seed);
}

int cmd_footprint(const GridOptions& o) {
    const auto points = run_grid(o);
    std::ofstream file;
    if (!o.out.empty()) file = open_out(o.out);
    std::ostream& out = o.out.empty() ? std::cout : file;
    out << "shape,sparsity,index_bits,alpha,proposed_bits,baseline_bits,ratio,footprint_saving_pct\n";
    for (const CostPoint& p : points) {
        const auto& r = p.report;
        out << p.shape << ',' << p.sparsity << ',' << p.index_bits << ',' << p.alpha << ',' << r.proposed_bits << ','
            << r.baseline_bits << ',' << static_cast<double>(r.baseline_bits) / static_cast<double>(r.proposed_bits)
            << ',' << r.footprint_saving_pct << '\n';
    }
    return 0;
}

int cmd_simulate(const GridOptions& o, const std::string& out_dir) {
    const auto points = run_grid(o);
    if (out_dir.empty()) {
        std::cout << cost_csv_header() << '\n';
        for (const CostPoint& p : points) std::cout << to_csv(p) << '\n';
        std::cout << '\n' << to_text(grid_table(o)) << '\n' << format_cost_table(points);
        return 0;
    }
    auto csv = open_out(fs::path(out_dir) / "costs.csv");
    csv << cost_csv_header() << '\n';
    for (const CostPoint& p : points) csv << to_csv(p) << '\n';
    open_out(fs::path(out_dir) / "cost_table.txt") << to_text(grid_table(o)) << '\n' << format_cost_table(points);
    std::cout << "wrote " << points.size() << " points to " << out_dir << '\n';
    return 0;
}

struct RankOptions {
    std::vector<std::string> shapes = {"120x84", "84x10"};
    std::vector<double> sparsities = {0.5, 0.9};
    std::uint32_t trials = 20;
    std::uint32_t seed = 1;
};

int cmd_rank(const RankOptions& o) {
    std::cout << "shape,sparsity,trial,dense_rank,masked_rank\n";
    for (const auto& s : o.shapes) {
        const LayerShape shape = parse_shape(s);
        for (double sp : o.sparsities) {
            for (std::uint32_t t = 0; t < o.trials; ++t) {
                const RankTrial r = rank_trial(shape.rows, shape.cols, sp, o.seed + t);
                std::cout << shape.name() << ',' << sp << ',' << t << ',' << r.dense_rank << ',' << r.masked_rank
                          << '\n';
            }
        }
    }
    return 0;
}

// --- sweep ------------------------------------------------------------------

struct SweepOptions {
    ExperimentConfig config;
    std::string arch = "8-16-3";
    std::vector<std::string> regs = {"l2"};
    std::string cost_table;
};

int cmd_sweep(SweepOptions o) {
    o.config.architecture = parse_arch(o.arch);
    o.config.reg_kinds.clear();
    for (const auto& r : o.regs) o.config.reg_kinds.push_back(tinynet::parse_reg_kind(r));
    const CostTable table = o.cost_table.empty() ? CostTable{} : load_cost_table(o.cost_table);
    const SweepResult result = run_sweep(o.config, table);
    std::cout << sweep_csv_header() << '\n';
    for (const SweepRow& row : result.runs) std::cout << to_csv(row) << '\n';
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"LFSR-based structured pruning toolkit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");
    app.add_option("--isa", "Force a kernel ISA (scalar|avx2); default picks the best available")
        ->each([](const std::string& name) {
            for (simd::Isa candidate : simd::supported_isas()) {
                if (name == simd::isa_name(candidate)) return simd::set_active_isa(candidate);
            }
            throw UsageError("unsupported --isa '" + name + "'");
        });

    int status = 0;

    LfsrOptions lo;
    auto* lfsr = app.add_subcommand("lfsr", "Print an LFSR state sequence and check its period");
    lfsr->add_option("--spec", lo.spec, "w=<int>,taps=<a>+<b>...,seed=<hex>; overrides --width/--seed");
    lfsr->add_option("--width", lo.width, "Register width, default taps")->capture_default_str();
    lfsr->add_option("--seed", lo.seed, "Seed state")->capture_default_str();
    lfsr->add_option("--count", lo.count, "States to print")->capture_default_str();
    lfsr->add_option("--index-range", lo.index_range, "Also map each state into [0, n); 0 disables")
        ->capture_default_str();
    lfsr->callback([&] { status = cmd_lfsr(lo); });

    MaskOptions mo;
    auto* mask = app.add_subcommand("mask", "Generate an LFSR pruning mask as order,row,col CSV");
    mask->add_option("--rows", mo.rows, "Layer inputs")->required();
    mask->add_option("--cols", mo.cols, "Layer outputs")->required();
    mask->add_option("--sparsity", mo.sparsity, "Target sparsity")->capture_default_str();
    mask->add_option("--seed", mo.seed, "Seed for the default register pair")->capture_default_str();
    mask->add_option("--row-spec", mo.row_spec, "Override the row register");
    mask->add_option("--col-spec", mo.col_spec, "Override the column register");
    mask->add_option("--out", mo.out, "CSV path; default stdout");
    mask->callback([&] { status = cmd_mask(mo); });

    TrainOptions to;
    auto* train = app.add_subcommand("train", "Train a dense model and save it");
    add_data_options(train, to.data);
    train->add_option("--arch", to.arch, "Layer sizes, e.g. 784-64-32-10")->capture_default_str();
    add_train_options(train, to.train);
    train->add_option("--epochs", to.train.train_epochs, "Training epochs")->capture_default_str();
    train->add_option("--out", to.out, "Model path")->capture_default_str();
    train->add_option("--log", to.log, "Per-epoch stage CSV");
    train->callback([&] { status = cmd_train(to); });

    PruneOptions po;
    auto* prune = app.add_subcommand("prune", "Attach LFSR masks, regularize the prune set and prune");
    add_data_options(prune, po.data);
    prune->add_option("--model", po.model, "Dense input model")->capture_default_str();
    prune->add_option("--sparsity", po.sparsity, "Target sparsity")->capture_default_str();
    prune->add_option("--lambda", po.train.reg_strength, "Regularization strength")->capture_default_str();
    prune->add_option("--reg", po.reg, "l1 | l2")->capture_default_str();
    prune->add_option("--mask-seed", po.mask_seed, "Layer l uses mask seed + l")->capture_default_str();
    add_train_options(prune, po.train);
    prune->add_option("--epochs", po.train.regularize_epochs, "Regularization epochs")->capture_default_str();
    prune->add_option("--out", po.out, "LFSR-sparse output model")->capture_default_str();
    prune->add_option("--log", po.log, "Per-epoch stage CSV");
    prune->callback([&] { status = cmd_prune(po); });

    RetrainOptions ro;
    auto* retrain = app.add_subcommand("retrain", "Retrain a pruned model with pruned weights pinned at zero");
    add_data_options(retrain, ro.data);
    retrain->add_option("--model", ro.model, "Sparse input model")->capture_default_str();
    add_train_options(retrain, ro.train);
    retrain->add_option("--epochs", ro.train.retrain_epochs, "Retraining epochs")->capture_default_str();
    retrain->add_option("--out", ro.out, "Output model")->capture_default_str();
    retrain->add_option("--log", ro.log, "Per-epoch stage CSV");
    retrain->callback([&] { status = cmd_retrain(ro); });

    EncodeOptions eo;
    auto* encode = app.add_subcommand("encode", "Convert a model between dense, lfsr and baseline storage");
    encode->add_option("--model", eo.model, "Input model")->required();
    encode->add_option("--format", eo.format, "dense | lfsr | baseline")->capture_default_str();
    encode->add_option("--value-bits", eo.value_bits, "8 | 32")->capture_default_str();
    encode->add_option("--index-bits", eo.index_bits, "Baseline relative-index width, 4 | 8")->capture_default_str();
    encode->add_option("--out", eo.out, "Output model")->required();
    encode->callback([&] { status = cmd_encode(eo); });

    InferOptions io;
    auto* inf = app.add_subcommand("infer", "Evaluate a stored model on the test split");
    add_data_options(inf, io.data);
    inf->add_option("--model", io.model, "Model path")->required();
    inf->add_flag("--int8", io.int8, "8-bit weights and activations with int32 accumulation");
    inf->add_option("--trace", io.trace, "Per-layer access trace CSV");
    inf->callback([&] { status = cmd_infer(io); });

    GridOptions fo;
    auto* foot = app.add_subcommand("footprint", "Storage of both formats over a shape x sparsity x index-bits grid");
    add_grid_options(foot, fo);
    foot->add_option("--out", fo.out, "CSV path; default stdout");
    foot->callback([&] { status = cmd_footprint(fo); });

    GridOptions so;
    std::string sim_out;
    auto* sim = app.add_subcommand("simulate", "Energy-proxy and storage comparison over a grid");
    add_grid_options(sim, so);
    sim->add_option("--cost-table", so.cost_table, "key = value cost file; default built-in table");
    sim->add_option("--out", sim_out, "Directory for costs.csv and cost_table.txt; default stdout");
    sim->callback([&] { status = cmd_simulate(so, sim_out); });

    RankOptions rko;
    auto* rank = app.add_subcommand("rank", "Numerical rank of Gaussian matrices before and after masking");
    rank->add_option("--shapes", rko.shapes, "Matrix shapes ROWSxCOLS")->capture_default_str()->delimiter(',');
    rank->add_option("--sparsities", rko.sparsities, "Sparsity levels")->capture_default_str()->delimiter(',');
    rank->add_option("--trials", rko.trials, "Trials per point")->capture_default_str();
    rank->add_option("--seed", rko.seed, "First trial seed")->capture_default_str();
    rank->callback([&] { status = cmd_rank(rko); });

    SweepOptions swo;
    auto& sc = swo.config;
    auto* sweep = app.add_subcommand("sweep", "Run the full pipeline over a parameter grid and write reports");
    sweep->add_option("--arch", swo.arch, "Layer sizes")->capture_default_str();
    sweep->add_option("--dataset", sc.dataset, "synthetic | mnist:<dir>")->capture_default_str();
    sweep->add_option("--sparsities", sc.sparsities, "Sparsity levels")->capture_default_str()->delimiter(',');
    sweep->add_option("--lambdas", sc.lambdas, "Regularization strengths")->capture_default_str()->delimiter(',');
    sweep->add_option("--regs", swo.regs, "Regularizer kinds (l1,l2)")->capture_default_str()->delimiter(',');
    sweep->add_option("--index-bits", sc.index_bits, "Baseline index widths")->capture_default_str()->delimiter(',');
    sweep->add_option("--seeds", sc.seeds, "Seeds (data, init, masks)")->capture_default_str()->delimiter(',');
    sweep->add_option("--out", sc.output_dir, "Report directory")->capture_default_str();
    sweep->add_option("--lr", sc.train.learning_rate, "Learning rate")->capture_default_str();
    sweep->add_option("--batch", sc.train.batch_size, "Mini-batch size")->capture_default_str();
    sweep->add_option("--train-epochs", sc.train.train_epochs, "Dense epochs")->capture_default_str();
    sweep->add_option("--regularize-epochs", sc.train.regularize_epochs, "Regularization epochs")
        ->capture_default_str();
    sweep->add_option("--retrain-epochs", sc.train.retrain_epochs, "Retraining epochs")->capture_default_str();
    sweep->add_option("--magnitude-iterations", sc.magnitude_iterations,
                      "Magnitude-pruning baseline iterations; 0 skips it")
        ->capture_default_str();
    sweep->add_option("--magnitude-retrain-epochs", sc.magnitude_retrain_epochs,
                      "Retraining epochs per magnitude iteration")
        ->capture_default_str();
    sweep->add_option("--cost-table", swo.cost_table, "key = value cost file; default built-in table");
    sweep->callback([&] { status = cmd_sweep(swo); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.kind());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
