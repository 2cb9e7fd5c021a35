#include "lfsrprune/mask.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "lfsrprune/error.hpp"

namespace lfsrprune {

MaskStream::MaskStream(std::uint32_t rows, std::uint32_t cols, std::uint64_t target, const LfsrSpec& row_spec,
                       const LfsrSpec& col_spec)
    : rows_(rows),
      cols_(cols),
      row_width_(validate_spec(row_spec).width),
      col_width_(validate_spec(col_spec).width),
      target_(target),
      row_reg_(row_spec),
      col_reg_(col_spec),
      row_state_(row_spec.seed),
      col_state_(col_spec.seed) {
    if (rows == 0 || cols == 0) throw ValidationError("mask needs at least one row and one column");
    if (target > std::uint64_t{rows} * cols) {
        throw ValidationError("kept count " + std::to_string(target) + " exceeds " + std::to_string(rows) + "x" +
                              std::to_string(cols));
    }
    visited_.assign(std::size_t{rows} * cols, 0);
}

std::optional<Position> MaskStream::next() {
    if (produced_ == target_) return std::nullopt;
    const std::uint64_t budget = kMaxStepsPerKept * target_;
    while (steps_ < budget) {
        const Position p{map_to_index(row_state_, rows_, row_width_), map_to_index(col_state_, cols_, col_width_)};
        ++steps_;
        row_state_ = row_reg_.next();
        col_state_ = col_reg_.next();
        std::uint8_t& seen = visited_[std::size_t{p.row} * cols_ + p.col];
        if (seen == 0) {
            seen = 1;
            ++produced_;
            return p;
        }
    }
    throw ValidationError("mask generation exhausted after " + std::to_string(steps_) + " steps with " +
                          std::to_string(produced_) + "/" + std::to_string(target_) +
                          " positions; widen the LFSRs or use coprime widths");
}

std::uint64_t kept_count_for(std::uint32_t rows, std::uint32_t cols, double sparsity) {
    if (!(sparsity >= 0.0 && sparsity < 1.0)) throw ValidationError("sparsity must be in [0, 1)");
    return static_cast<std::uint64_t>(std::llround((1.0 - sparsity) * static_cast<double>(rows) * cols));
}

Mask generate_mask_count(std::uint32_t rows, std::uint32_t cols, std::uint64_t kept, const LfsrSpec& row_spec,
                         const LfsrSpec& col_spec) {
    if (kept == 0) throw ValidationError("mask would keep no weights");
    MaskStream stream(rows, cols, kept, row_spec, col_spec);
    Mask mask;
    mask.rows_ = rows;
    mask.cols_ = cols;
    mask.row_spec_ = row_spec;
    mask.col_spec_ = col_spec;
    mask.kept_.reserve(kept);
    while (auto p = stream.next()) mask.kept_.push_back(*p);
    mask.steps_consumed_ = stream.steps();
    mask.target_sparsity_ = 1.0 - static_cast<double>(kept) / (static_cast<double>(rows) * cols);
    mask.flags_ = stream.visited();
    return mask;
}

Mask generate_mask(std::uint32_t rows, std::uint32_t cols, double sparsity, const LfsrSpec& row_spec,
                   const LfsrSpec& col_spec) {
    Mask mask = generate_mask_count(rows, cols, kept_count_for(rows, cols, sparsity), row_spec, col_spec);
    mask.target_sparsity_ = sparsity;
    return mask;
}

unsigned default_width_for(std::uint32_t n_items) {
    const unsigned log2_ceil = n_items <= 1 ? 0 : static_cast<unsigned>(std::bit_width(n_items - 1));
    return std::max(kMinLfsrWidth, log2_ceil + 2);
}

std::pair<LfsrSpec, LfsrSpec> default_mask_specs(std::uint32_t rows, std::uint32_t cols, std::uint32_t seed) {
    unsigned row_width = default_width_for(rows);
    unsigned col_width = default_width_for(cols);
    if (row_width > kMaxLfsrWidth || col_width > kMaxLfsrWidth) {
        throw ValidationError("layer too large for 24-bit LFSRs");
    }
    while (std::gcd(row_width, col_width) != 1) {
        if (col_width < kMaxLfsrWidth) {
            ++col_width;
        } else if (row_width < kMaxLfsrWidth) {
            ++row_width;
            col_width = default_width_for(cols);
        } else {
            throw ValidationError("no coprime LFSR widths available");
        }
    }
    auto truncate = [](std::uint32_t v, unsigned w) {
        v &= (1u << w) - 1u;
        return v == 0 ? 1u : v;
    };
    const std::uint32_t row_seed = truncate(seed, row_width);
    const std::uint32_t col_seed = truncate(row_seed ^ 0x5A5A5Au, col_width);
    return {validate_spec(default_spec(row_width, row_seed)), validate_spec(default_spec(col_width, col_seed))};
}

namespace {

void summarize(const std::vector<std::uint32_t>& counts, std::uint32_t& lo, std::uint32_t& hi, double& mean,
               double& cv) {
    lo = *std::min_element(counts.begin(), counts.end());
    hi = *std::max_element(counts.begin(), counts.end());
    double sum = 0.0, sq = 0.0;
    for (auto c : counts) sum += c;
    mean = sum / static_cast<double>(counts.size());
    for (auto c : counts) sq += (c - mean) * (c - mean);
    const double sd = std::sqrt(sq / static_cast<double>(counts.size()));
    cv = mean > 0.0 ? sd / mean : 0.0;
}

}  // namespace

MaskStats mask_stats(const Mask& mask) {
    MaskStats s;
    const double total = static_cast<double>(mask.rows()) * mask.cols();
    s.achieved_sparsity = 1.0 - static_cast<double>(mask.kept().size()) / total;
    s.row_counts.assign(mask.rows(), 0);
    s.col_counts.assign(mask.cols(), 0);
    for (const Position& p : mask.kept()) {
        ++s.row_counts[p.row];
        ++s.col_counts[p.col];
    }
    summarize(s.row_counts, s.row_min, s.row_max, s.row_mean, s.row_cv);
    summarize(s.col_counts, s.col_min, s.col_max, s.col_mean, s.col_cv);
    s.steps_consumed = mask.steps_consumed();
    s.steps_per_kept = mask.kept().empty() ? 0.0 : static_cast<double>(mask.steps_consumed()) / mask.kept().size();
    return s;
}

}  // namespace lfsrprune
