#include "lfsrprune/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "lfsrprune/error.hpp"

namespace lfsrprune {
namespace {

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    void put(std::uint32_t v, int n) {
        for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t u8() { return need(1)[0]; }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
    std::uint32_t u32() { return get(4); }
    float f32() { return std::bit_cast<float>(u32()); }
    std::span<const std::uint8_t> need(std::size_t n) {
        if (in_.size() - pos_ < n) throw FormatError("truncated LFSP container");
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == in_.size(); }

private:
    std::uint32_t get(int n) {
        const auto b = need(static_cast<std::size_t>(n));
        std::uint32_t v = 0;
        for (int i = 0; i < n; ++i) v |= std::uint32_t{b[static_cast<std::size_t>(i)]} << (8 * i);
        return v;
    }
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

void write_floats(Writer& w, const std::vector<float>& v) {
    for (float x : v) w.f32(x);
}

std::vector<float> read_floats(Reader& r, std::size_t n) {
    std::vector<float> v(n);
    for (float& x : v) x = r.f32();
    return v;
}

void write_spec(Writer& w, const LfsrSpec& s) {
    w.u8(static_cast<std::uint8_t>(s.width));
    w.u32(s.taps);
    w.u32(s.seed);
}

LfsrSpec read_spec(Reader& r) {
    LfsrSpec s;
    s.width = r.u8();
    s.taps = r.u32();
    s.seed = r.u32();
    return s;
}

void write_values_header(Writer& w, const ValueArray& v) {
    w.u8(static_cast<std::uint8_t>(v.bits));
    if (v.bits == ValueBits::Q8) w.f32(v.scale);
}

ValueArray read_values_header(Reader& r) {
    ValueArray v;
    const std::uint8_t bits = r.u8();
    if (bits == 32) {
        v.bits = ValueBits::F32;
    } else if (bits == 8) {
        v.bits = ValueBits::Q8;
        v.scale = r.f32();
    } else {
        throw FormatError("value bits must be 8 or 32, got " + std::to_string(bits));
    }
    return v;
}

void write_values(Writer& w, const ValueArray& v) {
    if (v.bits == ValueBits::F32) {
        write_floats(w, v.f32);
    } else {
        w.bytes(v.q8.data(), v.q8.size());
    }
}

void read_values(Reader& r, ValueArray& v, std::size_t n) {
    if (v.bits == ValueBits::F32) {
        v.f32 = read_floats(r, n);
    } else {
        const auto b = r.need(n);
        v.q8.resize(n);
        std::memcpy(v.q8.data(), b.data(), n);
    }
}

std::size_t checked_count(std::uint64_t n) {
    if (n > (std::uint64_t{1} << 32)) throw FormatError("layer too large");
    return static_cast<std::size_t>(n);
}

}  // namespace

LayerKind kind_of(const StoredLayer& layer) { return static_cast<LayerKind>(layer.index()); }

std::uint32_t rows_of(const StoredLayer& layer) {
    return std::visit([](const auto& l) { return l.rows; }, layer);
}

std::uint32_t cols_of(const StoredLayer& layer) {
    return std::visit([](const auto& l) { return l.cols; }, layer);
}

std::vector<std::uint8_t> to_bytes(const StoredModel& model) {
    if (model.layers.size() > 0xFFFF) throw ValidationError("too many layers for the container");
    Writer w;
    w.bytes("LFSP", 4);
    w.u16(kContainerVersion);
    w.u16(static_cast<std::uint16_t>(model.layers.size()));
    for (const StoredLayer& layer : model.layers) {
        w.u8(static_cast<std::uint8_t>(kind_of(layer)));
        w.u32(rows_of(layer));
        w.u32(cols_of(layer));
        if (const auto* d = std::get_if<DenseLayer>(&layer)) {
            write_floats(w, d->weights);
            write_floats(w, d->bias);
        } else if (const auto* s = std::get_if<LfsrSparseLayer>(&layer)) {
            write_spec(w, s->row_spec);
            write_spec(w, s->col_spec);
            w.u32(static_cast<std::uint32_t>(s->nnz));
            write_values_header(w, s->values);
            write_values(w, s->values);
            write_floats(w, s->bias);
        } else {
            const auto& c = std::get<BaselineCompressed>(layer);
            w.u8(static_cast<std::uint8_t>(c.index_bits));
            write_values_header(w, c.S);
            w.u32(static_cast<std::uint32_t>(c.nnz));
            w.u32(static_cast<std::uint32_t>(c.S.size()));
            write_values(w, c.S);
            if (c.index_bits == 8) {
                w.bytes(c.I.data(), c.I.size());
            } else {
                for (std::size_t k = 0; k < c.I.size(); k += 2) {
                    const std::uint8_t lo = c.I[k] & 0x0F;
                    const std::uint8_t hi = k + 1 < c.I.size() ? (c.I[k + 1] & 0x0F) : 0;
                    w.u8(static_cast<std::uint8_t>(lo | (hi << 4)));
                }
            }
            for (std::uint32_t p : c.P) w.u32(p);
            write_floats(w, c.bias);
        }
    }
    return w.take();
}

StoredModel from_bytes(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    const auto magic = r.need(4);
    if (std::memcmp(magic.data(), "LFSP", 4) != 0) throw FormatError("not an LFSP container (bad magic)");
    const std::uint16_t version = r.u16();
    if (version != kContainerVersion) throw FormatError("unsupported LFSP version " + std::to_string(version));
    const std::uint16_t count = r.u16();

    StoredModel model;
    for (std::uint16_t l = 0; l < count; ++l) {
        const std::uint8_t kind = r.u8();
        const std::uint32_t rows = r.u32();
        const std::uint32_t cols = r.u32();
        const std::size_t cells = checked_count(std::uint64_t{rows} * cols);
        switch (kind) {
            case 0: {
                DenseLayer d{rows, cols, read_floats(r, cells), {}};
                d.bias = read_floats(r, cols);
                model.layers.emplace_back(std::move(d));
                break;
            }
            case 1: {
                LfsrSparseLayer s;
                s.rows = rows;
                s.cols = cols;
                s.row_spec = read_spec(r);
                s.col_spec = read_spec(r);
                s.nnz = r.u32();
                if (s.nnz > cells) throw FormatError("nnz exceeds layer size");
                s.values = read_values_header(r);
                read_values(r, s.values, static_cast<std::size_t>(s.nnz));
                s.bias = read_floats(r, cols);
                model.layers.emplace_back(std::move(s));
                break;
            }
            case 2: {
                BaselineCompressed c;
                c.rows = rows;
                c.cols = cols;
                c.index_bits = r.u8();
                if (c.index_bits != 4 && c.index_bits != 8) throw FormatError("index bits must be 4 or 8");
                c.S = read_values_header(r);
                c.nnz = r.u32();
                const std::size_t stored = r.u32();
                if (stored > (std::size_t{1} << 32)) throw FormatError("|S| too large");
                read_values(r, c.S, stored);
                if (c.index_bits == 8) {
                    const auto b = r.need(stored);
                    c.I.assign(b.begin(), b.end());
                } else {
                    const auto b = r.need((stored + 1) / 2);
                    c.I.resize(stored);
                    for (std::size_t k = 0; k < stored; ++k) {
                        c.I[k] = static_cast<std::uint8_t>(k % 2 == 0 ? b[k / 2] & 0x0F : b[k / 2] >> 4);
                    }
                }
                c.P.resize(std::size_t{cols} + 1);
                for (std::uint32_t& p : c.P) p = r.u32();
                c.bias = read_floats(r, cols);
                check_structure(c);
                model.layers.emplace_back(std::move(c));
                break;
            }
            default:
                throw FormatError("unknown layer kind " + std::to_string(kind));
        }
    }
    if (!r.done()) throw FormatError("trailing bytes after the last layer");
    return model;
}

void save_model(const std::filesystem::path& path, const StoredModel& model) {
    const auto bytes = to_bytes(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("write failed: " + path.string());
}

StoredModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_bytes(bytes);
}

DenseLayer to_dense_layer(const tinynet::Layer& layer) {
    DenseLayer d;
    d.rows = static_cast<std::uint32_t>(layer.inputs());
    d.cols = static_cast<std::uint32_t>(layer.outputs());
    d.weights.assign(layer.weights.data.begin(), layer.weights.data.end());
    d.bias.assign(layer.bias.begin(), layer.bias.end());
    return d;
}

StoredModel export_model(const tinynet::Model& model, LayerKind kind, ValueBits bits, unsigned index_bits) {
    model.validate();
    StoredModel out;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const tinynet::Layer& layer = model.layers[l];
        DenseLayer dense = to_dense_layer(layer);
        switch (kind) {
            case LayerKind::Dense:
                out.layers.emplace_back(std::move(dense));
                break;
            case LayerKind::LfsrSparse:
                if (!layer.mask) throw ValidationError("layer " + std::to_string(l) + " has no LFSR mask to export");
                out.layers.emplace_back(encode_lfsr(dense, *layer.mask, bits));
                break;
            case LayerKind::Baseline:
                out.layers.emplace_back(encode_baseline(dense, index_bits, bits));
                break;
        }
    }
    return out;
}

tinynet::Model import_model(const StoredModel& stored) {
    tinynet::Model model;
    for (const StoredLayer& s : stored.layers) {
        DenseLayer dense;
        std::optional<Mask> mask;
        if (const auto* d = std::get_if<DenseLayer>(&s)) {
            dense = *d;
        } else if (const auto* sp = std::get_if<LfsrSparseLayer>(&s)) {
            dense = decode_lfsr(*sp);
            mask = replay_mask(*sp);
        } else {
            dense = decode_baseline(std::get<BaselineCompressed>(s));
        }
        tinynet::Layer layer;
        layer.weights = tinynet::Matrix(dense.rows, dense.cols);
        std::copy(dense.weights.begin(), dense.weights.end(), layer.weights.data.begin());
        layer.bias.assign(dense.bias.begin(), dense.bias.end());
        if (mask) {
            layer.attach_mask(std::move(*mask));
        } else if (kind_of(s) == LayerKind::Baseline) {
            layer.prune_flags.resize(dense.weights.size());
            for (std::size_t i = 0; i < dense.weights.size(); ++i) layer.prune_flags[i] = dense.weights[i] == 0.0f;
        }
        model.layers.push_back(std::move(layer));
    }
    model.validate();
    return model;
}

}  // namespace lfsrprune
