#include <doctest.h>

#include <cmath>
#include <numeric>

#include "json.hpp"
#include "lfsrprune/error.hpp"
#include "lfsrprune/tinynet.hpp"
#include "oracles/gradcheck.hpp"

using namespace lfsrprune;
using namespace lfsrprune::tinynet;

namespace {

// Straight triple loop, no shared helpers.
std::vector<double> oracle_forward(const Model& m, std::vector<double> x) {
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        const Layer& layer = m.layers[l];
        std::vector<double> z(layer.outputs());
        for (std::size_t c = 0; c < layer.outputs(); ++c) {
            double s = layer.bias[c];
            for (std::size_t r = 0; r < layer.inputs(); ++r) s += x[r] * layer.weights(r, c);
            z[c] = s;
        }
        if (l + 1 < m.layers.size()) {
            for (double& v : z) v = v > 0 ? v : 0;
        } else {
            double mx = z[0], sum = 0;
            for (double v : z) mx = std::max(mx, v);
            for (double& v : z) sum += (v = std::exp(v - mx));
            for (double& v : z) v /= sum;
        }
        x = z;
    }
    return x;
}

Model masked_model(std::vector<std::size_t> arch, double sparsity, std::uint64_t seed) {
    Model m = make_model(arch, seed);
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        Layer& layer = m.layers[l];
        const auto r = static_cast<std::uint32_t>(layer.inputs()), c = static_cast<std::uint32_t>(layer.outputs());
        const auto specs = default_mask_specs(r, c, static_cast<std::uint32_t>(seed + l));
        layer.attach_mask(generate_mask(r, c, sparsity, specs.first, specs.second));
    }
    return m;
}

std::vector<std::size_t> first_n(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

}  // namespace

TEST_CASE("initialization is scaled uniform with zero bias") {
    const std::vector<std::size_t> arch = {20, 10, 4};
    const Model m = make_model(arch, 3);
    CHECK(m.architecture() == arch);
    CHECK(m.weight_count() == 240);
    const double bound = std::sqrt(6.0 / 30.0);
    for (double w : m.layers[0].weights.data) CHECK(std::abs(w) <= bound);
    for (double b : m.layers[0].bias) CHECK(b == 0.0);
    CHECK(make_model(arch, 3).layers[1].weights.data == m.layers[1].weights.data);
    CHECK(make_model(arch, 4).layers[1].weights.data != m.layers[1].weights.data);
}

TEST_CASE("forward matches the triple-loop oracle") {
    const std::vector<std::size_t> arch = {9, 7, 5, 4};
    Model m = make_model(arch, 11);
    for (auto& layer : m.layers)
        for (std::size_t c = 0; c < layer.bias.size(); ++c) layer.bias[c] = 0.1 * static_cast<double>(c) - 0.2;
    const DataSplit d = gen_synthetic_split(2, 20, 1, 9, 4);
    for (std::size_t i = 0; i < d.train.size(); ++i) {
        const auto s = d.train.sample(i);
        const Activations act = forward(m, s);
        const auto got = act.output();
        const auto want = oracle_forward(m, {s.begin(), s.end()});
        REQUIRE(got.size() == want.size());
        for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-12));
        CHECK(std::accumulate(got.begin(), got.end(), 0.0) == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(forward(m, std::vector<double>(3)), ValidationError);
}

TEST_CASE("analytic gradients match central differences in every phase") {
    const DataSplit d = gen_synthetic_split(5, 24, 1, 8, 3);
    const auto batch = first_n(8);
    for (RegKind kind : {RegKind::L1, RegKind::L2}) {
        for (Phase phase : {Phase::Train, Phase::Regularize, Phase::Retrain}) {
            CAPTURE(to_string(kind));
            CAPTURE(to_string(phase));
            Model m = phase == Phase::Train ? make_model(std::vector<std::size_t>{8, 6, 3}, 9)
                                            : masked_model({8, 6, 3}, 0.5, 9);
            for (auto& layer : m.layers)
                for (double& b : layer.bias) b = 0.05;
            TrainConfig cfg;
            cfg.reg_kind = kind;
            cfg.reg_strength = 0.7;
            const double worst = oracle::worst_gradient_error(m, d.train, batch, cfg, phase);
            CHECK(worst < 1e-4);
        }
    }
}

TEST_CASE("regularize step decays prune-set weights exactly") {
    const DataSplit d = gen_synthetic_split(1, 32, 1, 8, 3);
    const auto batch = first_n(16);
    TrainConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.reg_strength = 4.0;

    Model m = masked_model({8, 6, 3}, 0.6, 2);
    const Model before = m;
    sgd_step(m, d.train, batch, cfg, Phase::Regularize);
    const double decay = 0.1 * 4.0 / 16.0;
    for (std::size_t l = 0; l < m.layers.size(); ++l)
        for (std::size_t i = 0; i < m.layers[l].weights.data.size(); ++i)
            if (m.layers[l].in_prune_set(i))
                CHECK(m.layers[l].weights.data[i] == before.layers[l].weights.data[i] * (1.0 - decay));

    cfg.reg_kind = RegKind::L1;
    m = before;
    sgd_step(m, d.train, batch, cfg, Phase::Regularize);
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        for (std::size_t i = 0; i < m.layers[l].weights.data.size(); ++i) {
            if (!m.layers[l].in_prune_set(i)) continue;
            const double w0 = before.layers[l].weights.data[i], w1 = m.layers[l].weights.data[i];
            if (std::abs(w0) <= decay) {
                CHECK(w1 == 0.0);
            } else {
                CHECK(std::abs(w1) == doctest::Approx(std::abs(w0) - decay));
                CHECK(w1 * w0 > 0);
            }
        }
    }
}

TEST_CASE("a decay factor of one or more is rejected") {
    const DataSplit d = gen_synthetic_split(1, 8, 1, 8, 3);
    Model m = masked_model({8, 6, 3}, 0.5, 1);
    TrainConfig cfg;
    cfg.learning_rate = 0.5;
    cfg.reg_strength = 4.0;
    CHECK_THROWS_AS(sgd_step(m, d.train, first_n(2), cfg, Phase::Regularize), ValidationError);
    CHECK_NOTHROW(sgd_step(m, d.train, first_n(2), cfg, Phase::Train));
}

TEST_CASE("config validation") {
    TrainConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.learning_rate = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.reg_strength = -1;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    CHECK(parse_reg_kind("l1") == RegKind::L1);
    CHECK(parse_reg_kind("L2") == RegKind::L2);
    CHECK_THROWS_AS(parse_reg_kind("l3"), UsageError);
}

TEST_CASE("prune zeroes exactly the prune set and retraining keeps it zero") {
    const DataSplit d = gen_synthetic_split(3, 64, 16, 8, 3);
    Model m = masked_model({8, 6, 3}, 0.7, 4);
    prune(m);
    for (const Layer& layer : m.layers) {
        for (std::size_t i = 0; i < layer.weights.data.size(); ++i) {
            if (layer.in_prune_set(i)) CHECK(layer.weights.data[i] == 0.0);
        }
        CHECK(layer.sparsity() >= 0.69);
    }
    TrainConfig cfg;
    for (int e = 0; e < 3; ++e) run_epoch(m, d.train, cfg, Phase::Retrain, e);
    for (const Layer& layer : m.layers)
        for (std::size_t i = 0; i < layer.weights.data.size(); ++i)
            if (layer.in_prune_set(i)) CHECK(layer.weights.data[i] == 0.0);

    Model plain = make_model(std::vector<std::size_t>{8, 6, 3}, 1);
    CHECK_THROWS_AS(prune(plain), ValidationError);
}

TEST_CASE("dense 8-16-3 learns the synthetic task") {
    const DataSplit d = gen_synthetic_split(1, 600, 300, 8, 3);
    const std::vector<std::size_t> arch = {8, 16, 3};
    Model m = make_model(arch, 1);
    TrainConfig cfg;
    for (std::size_t e = 0; e < cfg.train_epochs; ++e) run_epoch(m, d.train, cfg, Phase::Train, e);
    CHECK(evaluate(m, d.test) >= 0.95);
}

TEST_CASE("pipeline is deterministic and reaches the target sparsity") {
    const DataSplit d = gen_synthetic_split(2, 300, 100, 8, 3);
    const std::vector<std::size_t> arch = {8, 16, 3};
    TrainConfig cfg;
    cfg.train_epochs = 4;
    cfg.regularize_epochs = 3;
    cfg.retrain_epochs = 3;
    const PipelineResult a = run_pipeline(d, arch, cfg, 0.7, 5);
    const PipelineResult b = run_pipeline(d, arch, cfg, 0.7, 5);
    CHECK(a.pruned.layers[0].weights.data == b.pruned.layers[0].weights.data);
    CHECK(a.report.retrained_test_acc == b.report.retrained_test_acc);
    CHECK(a.report.rows.size() == 4 + 3 + 1 + 3);
    CHECK(a.report.compression_rate == doctest::Approx(1.0 / 0.3).epsilon(0.02));
    for (double sp : a.report.layer_sparsity) CHECK(sp >= 0.69);
    REQUIRE(a.report.mask_specs.size() == 2);
    CHECK(a.report.mask_specs[1] == default_mask_specs(16, 3, 6));
    CHECK(a.report.retrained_test_acc >= 0.9);

    const auto j = nlohmann::json::parse(to_json(a.report));
    CHECK(j["retrained_test_acc"].get<double>() == a.report.retrained_test_acc);
    CHECK(j["masks"].size() == 2);
    CHECK(pipeline_csv_header() == "stage,epoch,train_acc,test_acc,sparsity,mean_abs_pruneset_weight");
    CHECK(to_csv(a.report.rows.front()).rfind("train,1,", 0) == 0);

    CHECK_THROWS_AS(run_pipeline(d, std::vector<std::size_t>{9, 16, 3}, cfg, 0.7, 5), ValidationError);
}

TEST_CASE("stronger regularization leaves smaller prune-set weights") {
    const DataSplit d = gen_synthetic_split(1, 300, 50, 8, 3);
    TrainConfig cfg;
    cfg.train_epochs = 3;
    cfg.regularize_epochs = 3;
    cfg.retrain_epochs = 0;
    double last = 1e9;
    for (double lambda : {0.1, 2.0, 10.0}) {
        cfg.reg_strength = lambda;
        const PipelineResult r = run_pipeline(d, std::vector<std::size_t>{8, 16, 3}, cfg, 0.7, 1);
        CHECK(r.report.mean_abs_pruneset_after_regularize < last);
        last = r.report.mean_abs_pruneset_after_regularize;
    }
}

TEST_CASE("magnitude baseline hits its sparsity target") {
    const DataSplit d = gen_synthetic_split(1, 200, 50, 8, 3);
    Model m = make_model(std::vector<std::size_t>{8, 16, 3}, 1);
    TrainConfig cfg;
    for (int e = 0; e < 3; ++e) run_epoch(m, d.train, cfg, Phase::Train, e);
    Model untouched = m;
    magnitude_prune_baseline(untouched, d.train, cfg, 0.0, 3, 1);
    CHECK(untouched.layers[0].weights.data == m.layers[0].weights.data);

    magnitude_prune_baseline(m, d.train, cfg, 0.75, 3, 1);
    for (const Layer& layer : m.layers) CHECK(layer.sparsity() == doctest::Approx(0.75).epsilon(0.05));
    CHECK(compression_rate(100, 25) == 4.0);
}
