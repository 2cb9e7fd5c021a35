#include <doctest.h>

#include <algorithm>
#include <array>
#include <filesystem>
#include <string>

#include "lfsrprune/dataset.hpp"
#include "lfsrprune/error.hpp"

using namespace lfsrprune;

namespace {

std::vector<std::uint8_t> be32(std::uint32_t v) {
    return {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 8),
            static_cast<std::uint8_t>(v)};
}

std::vector<std::uint8_t> idx(std::uint32_t magic, std::vector<std::uint32_t> dims, std::vector<std::uint8_t> body) {
    std::vector<std::uint8_t> out = be32(magic);
    for (auto d : dims) {
        auto b = be32(d);
        out.insert(out.end(), b.begin(), b.end());
    }
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

std::string format_error(const std::vector<std::uint8_t>& bytes) {
    try {
        parse_idx(bytes);
    } catch (const FormatError& e) {
        return e.what();
    }
    return {};
}

const std::filesystem::path kMnist = std::filesystem::path(LFSRPRUNE_DATA_DIR) / "mnist-subset";

}  // namespace

TEST_CASE("label file with two entries") {
    const IdxContent c = parse_idx(idx(0x00000801, {2}, {7, 3}));
    CHECK(c.kind == IdxContent::Kind::Labels);
    CHECK(c.labels == std::vector<int>{7, 3});
    CHECK(c.dims == std::vector<std::uint32_t>{2});
}

TEST_CASE("image file is flattened and scaled") {
    const IdxContent c = parse_idx(idx(0x00000803, {2, 1, 2}, {0, 255, 51, 102}));
    CHECK(c.kind == IdxContent::Kind::Images);
    REQUIRE(c.pixels.size() == 4);
    CHECK(c.pixels[0] == 0.0);
    CHECK(c.pixels[1] == 1.0);
    CHECK(c.pixels[2] == doctest::Approx(0.2));
    CHECK(c.pixels[3] == doctest::Approx(0.4));
}

TEST_CASE("malformed IDX input") {
    CHECK(format_error(idx(0x00000899, {1}, {0})).find("unknown magic") != std::string::npos);
    CHECK(format_error(idx(0x00000801, {3}, {1, 2})).find("truncated") != std::string::npos);
    CHECK(format_error({0, 0, 8}).find("truncated") != std::string::npos);
    CHECK(format_error(idx(0x00000803, {0xFFFFFFFF, 0xFFFFFFFF, 0xFFFFFFFF}, {})).find("overflow") !=
          std::string::npos);
    CHECK_THROWS_AS(read_idx_file("/nonexistent/file"), FormatError);
}

TEST_CASE("pairing images with labels") {
    const IdxContent img = parse_idx(idx(0x00000803, {2, 1, 2}, {0, 255, 255, 0}));
    const IdxContent lab = parse_idx(idx(0x00000801, {2}, {1, 0}));
    const Dataset d = make_dataset(img, lab, 2);
    CHECK(d.size() == 2);
    CHECK(d.n_features == 2);
    CHECK(d.sample(1)[0] == 1.0);
    CHECK_THROWS_AS(make_dataset(img, parse_idx(idx(0x00000801, {1}, {0})), 2), FormatError);
    CHECK_THROWS_AS(make_dataset(lab, img, 2), FormatError);
    CHECK_THROWS_AS(make_dataset(img, lab, 1), ValidationError);  // label 1 with one class
}

TEST_CASE("fuzzed byte strings never crash the parser") {
    std::uint64_t x = 12345;
    for (int trial = 0; trial < 2000; ++trial) {
        x = x * 6364136223846793005ull + 1442695040888963407ull;
        std::vector<std::uint8_t> bytes(x % 40);
        for (auto& b : bytes) {
            x = x * 6364136223846793005ull + 1442695040888963407ull;
            b = static_cast<std::uint8_t>(x >> 56);
        }
        if (trial % 2 == 0 && bytes.size() >= 4) {
            bytes[0] = bytes[1] = 0;
            bytes[2] = 8;
            bytes[3] = trial % 4 == 0 ? 1 : 3;
        }
        try {
            parse_idx(bytes);
        } catch (const FormatError&) {
        }
    }
}

TEST_CASE("synthetic blobs are deterministic") {
    const Dataset a = gen_synthetic(3, 200, 8, 3), b = gen_synthetic(3, 200, 8, 3), c = gen_synthetic(4, 200, 8, 3);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    CHECK(a.features != c.features);
    CHECK(a.n_features == 8);
    CHECK(a.n_classes == 3);
    for (int y : a.labels) CHECK((y >= 0 && y < 3));
}

TEST_CASE("one synthetic class gives all-zero labels") {
    const Dataset d = gen_synthetic(1, 50, 4, 1);
    for (int y : d.labels) CHECK(y == 0);
    CHECK_THROWS_AS(gen_synthetic(1, 10, 0, 2), UsageError);
}

TEST_CASE("synthetic split sizes") {
    const DataSplit s = gen_synthetic_split(1, 600, 300, 8, 3);
    CHECK(s.train.size() == 600);
    CHECK(s.test.size() == 300);
    CHECK(s.train.features != s.test.features);
}

TEST_CASE("shipped MNIST subset: sizes and label histograms") {
    if (!std::filesystem::exists(kMnist)) {
        MESSAGE("MNIST subset missing, skipped");
        return;
    }
    const DataSplit d = load_mnist(kMnist);
    CHECK(d.train.size() == 2000);
    CHECK(d.test.size() == 500);
    CHECK(d.train.n_features == 784);
    CHECK(d.train.n_classes == 10);
    // Counted by an independent Python pass over the same files.
    std::array<int, 10> train{}, test{};
    for (int y : d.train.labels) ++train[y];
    for (int y : d.test.labels) ++test[y];
    CHECK(train == std::array<int, 10>{202, 197, 186, 215, 190, 199, 193, 209, 197, 212});
    CHECK(test == std::array<int, 10>{46, 51, 55, 44, 49, 53, 51, 53, 50, 48});
    CHECK(std::all_of(d.train.features.begin(), d.train.features.end(), [](double p) { return p >= 0.0 && p <= 1.0; }));
}
