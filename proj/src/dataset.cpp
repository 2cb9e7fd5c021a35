#include "lfsrprune/dataset.hpp"

#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "lfsrprune/error.hpp"
#include "lfsrprune/random.hpp"

namespace lfsrprune {
namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
    if (offset + 4 > bytes.size()) throw FormatError("truncated IDX header");
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

}  // namespace

void Dataset::validate() const {
    if (features.size() != labels.size() * n_features) throw ValidationError("dataset feature count mismatch");
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= n_classes) {
            throw ValidationError("label " + std::to_string(y) + " outside " + std::to_string(n_classes) + " classes");
        }
    }
}

IdxContent parse_idx(std::span<const std::uint8_t> bytes) {
    const std::uint32_t magic = read_be32(bytes, 0);
    IdxContent out;
    std::size_t n_dims = 0;
    if (magic == kImagesMagic) {
        out.kind = IdxContent::Kind::Images;
        n_dims = 3;
    } else if (magic == kLabelsMagic) {
        out.kind = IdxContent::Kind::Labels;
        n_dims = 1;
    } else {
        std::ostringstream msg;
        msg << "unknown magic 0x" << std::hex << magic;
        throw FormatError(msg.str());
    }

    std::uint64_t count = 1;
    for (std::size_t d = 0; d < n_dims; ++d) {
        const std::uint32_t dim = read_be32(bytes, 4 + 4 * d);
        out.dims.push_back(dim);
        count *= dim;
        if (count > (std::uint64_t{1} << 34)) throw FormatError("IDX dimensions overflow");
    }
    const std::size_t header = 4 + 4 * n_dims;
    if (bytes.size() - header < count) {
        throw FormatError("truncated IDX payload: need " + std::to_string(count) + " bytes, have " +
                          std::to_string(bytes.size() - header));
    }
    const auto payload = bytes.subspan(header, static_cast<std::size_t>(count));
    if (out.kind == IdxContent::Kind::Images) {
        out.pixels.reserve(payload.size());
        for (std::uint8_t b : payload) out.pixels.push_back(static_cast<double>(b) / 255.0);
    } else {
        out.labels.assign(payload.begin(), payload.end());
    }
    return out;
}

IdxContent read_idx_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_idx(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

Dataset make_dataset(const IdxContent& images, const IdxContent& labels, std::size_t n_classes) {
    if (images.kind != IdxContent::Kind::Images || labels.kind != IdxContent::Kind::Labels) {
        throw FormatError("expected an image file and a label file");
    }
    if (images.dims[0] != labels.dims[0]) throw FormatError("image and label counts differ");
    Dataset ds;
    ds.n_features = std::size_t{images.dims[1]} * images.dims[2];
    ds.n_classes = n_classes;
    ds.features = images.pixels;
    ds.labels = labels.labels;
    ds.validate();
    return ds;
}

DataSplit load_mnist(const std::filesystem::path& dir) {
    return {make_dataset(read_idx_file(dir / "train-images-idx3-ubyte"), read_idx_file(dir / "train-labels-idx1-ubyte")),
            make_dataset(read_idx_file(dir / "t10k-images-idx3-ubyte"), read_idx_file(dir / "t10k-labels-idx1-ubyte"))};
}

namespace {

struct Blobs {
    std::size_t n_features, n_classes;
    std::vector<double> centroids;
};

Blobs make_blobs(Rng& rng, std::size_t n_features, std::size_t n_classes, double separation) {
    Blobs b{n_features, n_classes, {}};
    b.centroids.resize(n_features * n_classes);
    for (double& c : b.centroids) c = separation * rng.normal();
    return b;
}

Dataset sample_blobs(Rng& rng, const Blobs& b, std::size_t n_samples) {
    Dataset ds;
    ds.n_features = b.n_features;
    ds.n_classes = b.n_classes;
    ds.features.resize(n_samples * b.n_features);
    ds.labels.resize(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const std::size_t label = b.n_classes == 1 ? 0 : rng.below(b.n_classes);
        ds.labels[i] = static_cast<int>(label);
        for (std::size_t f = 0; f < b.n_features; ++f) {
            ds.features[i * b.n_features + f] = b.centroids[label * b.n_features + f] + rng.normal();
        }
    }
    return ds;
}

}  // namespace

Dataset gen_synthetic(std::uint64_t seed, std::size_t n_samples, std::size_t n_features, std::size_t n_classes,
                      double separation) {
    if (n_features == 0 || n_classes == 0) throw UsageError("synthetic data needs features and classes");
    Rng rng(seed);
    const Blobs blobs = make_blobs(rng, n_features, n_classes, separation);
    return sample_blobs(rng, blobs, n_samples);
}

DataSplit gen_synthetic_split(std::uint64_t seed, std::size_t n_train, std::size_t n_test, std::size_t n_features,
                              std::size_t n_classes, double separation) {
    if (n_features == 0 || n_classes == 0) throw UsageError("synthetic data needs features and classes");
    Rng rng(seed);
    const Blobs blobs = make_blobs(rng, n_features, n_classes, separation);
    DataSplit split;
    split.train = sample_blobs(rng, blobs, n_train);
    split.test = sample_blobs(rng, blobs, n_test);
    return split;
}

}  // namespace lfsrprune
