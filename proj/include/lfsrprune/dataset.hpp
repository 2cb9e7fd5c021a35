#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace lfsrprune {

struct Dataset {
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    std::vector<double> features;  // sample-major, n_features per sample
    std::vector<int> labels;

    std::size_t size() const noexcept { return labels.size(); }
    bool empty() const noexcept { return labels.empty(); }
    std::span<const double> sample(std::size_t i) const { return {features.data() + i * n_features, n_features}; }

    /// Throws ValidationError if labels or feature counts are inconsistent.
    void validate() const;
};

struct DataSplit {
    Dataset train;
    Dataset test;
};

/// One parsed IDX file: unsigned-byte images (magic 0x00000803) or labels
/// (magic 0x00000801). Images are flattened row-major and scaled to [0, 1].
struct IdxContent {
    enum class Kind { Images, Labels };
    Kind kind = Kind::Labels;
    std::vector<std::uint32_t> dims;
    std::vector<double> pixels;
    std::vector<int> labels;
};

/// Throws FormatError on unknown magic, truncated payload or oversized dims.
IdxContent parse_idx(std::span<const std::uint8_t> bytes);
IdxContent read_idx_file(const std::filesystem::path& path);

/// Pairs an image file with a label file.
Dataset make_dataset(const IdxContent& images, const IdxContent& labels, std::size_t n_classes = 10);

/// Loads train-{images,labels} and t10k-{images,labels} IDX files from `dir`.
DataSplit load_mnist(const std::filesystem::path& dir);

/// Seeded Gaussian blobs: one centroid per class drawn from N(0, separation^2 I),
/// samples at centroid + N(0, I), labels uniform over classes.
Dataset gen_synthetic(std::uint64_t seed, std::size_t n_samples, std::size_t n_features, std::size_t n_classes,
                      double separation = 4.0);

/// The same blobs split into train and test parts.
DataSplit gen_synthetic_split(std::uint64_t seed, std::size_t n_train, std::size_t n_test, std::size_t n_features,
                              std::size_t n_classes, double separation = 4.0);

}  // namespace lfsrprune
