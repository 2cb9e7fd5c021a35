#pragma once

// Pseudo-random sparsity patterns driven by a pair of LFSRs.
//
// The row register picks the input neuron and the column register the output
// neuron. Both advance in lockstep; each step proposes the pair
// (map_to_index(row_state, rows), map_to_index(col_state, cols)). Pairs that
// were already kept are skipped, so the kept list is a deterministic function
// of (rows, cols, kept count, row_spec, col_spec).

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "lfsrprune/lfsr.hpp"

namespace lfsrprune {

struct Position {
    std::uint32_t row = 0;
    std::uint32_t col = 0;

    friend bool operator==(const Position&, const Position&) = default;
};

/// Generation gives up after this many steps per kept position.
inline constexpr std::uint64_t kMaxStepsPerKept = 64;

/// Kept positions of one layer. Immutable once generated; the persisted form
/// is the generation recipe, never the position list.
class Mask {
public:
    Mask() = default;

    std::uint32_t rows() const noexcept { return rows_; }
    std::uint32_t cols() const noexcept { return cols_; }
    const std::vector<Position>& kept() const noexcept { return kept_; }  // generation order
    const LfsrSpec& row_spec() const noexcept { return row_spec_; }
    const LfsrSpec& col_spec() const noexcept { return col_spec_; }
    double target_sparsity() const noexcept { return target_sparsity_; }
    std::uint64_t steps_consumed() const noexcept { return steps_consumed_; }

    bool is_kept(std::uint32_t row, std::uint32_t col) const { return flags_[std::size_t{row} * cols_ + col] != 0; }
    /// Row-major rows x cols, 1 where the weight survives.
    const std::vector<std::uint8_t>& kept_flags() const noexcept { return flags_; }
    std::size_t prune_count() const noexcept { return std::size_t{rows_} * cols_ - kept_.size(); }

    friend bool operator==(const Mask& a, const Mask& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.kept_ == b.kept_ && a.row_spec_ == b.row_spec_ &&
               a.col_spec_ == b.col_spec_ && a.steps_consumed_ == b.steps_consumed_;
    }

private:
    std::uint32_t rows_ = 0;
    std::uint32_t cols_ = 0;
    std::vector<Position> kept_;
    LfsrSpec row_spec_;
    LfsrSpec col_spec_;
    double target_sparsity_ = 0.0;
    std::uint64_t steps_consumed_ = 0;
    std::vector<std::uint8_t> flags_;

    friend Mask generate_mask_count(std::uint32_t, std::uint32_t, std::uint64_t, const LfsrSpec&, const LfsrSpec&);
    friend Mask generate_mask(std::uint32_t, std::uint32_t, double, const LfsrSpec&, const LfsrSpec&);
};

/// Replays the pair stream one distinct position at a time. Used directly by
/// the inference kernel; generate_mask drains it.
class MaskStream {
public:
    MaskStream(std::uint32_t rows, std::uint32_t cols, std::uint64_t target, const LfsrSpec& row_spec,
               const LfsrSpec& col_spec);

    /// Next distinct position, or nullopt once `target` positions were produced.
    /// Throws ValidationError when the step budget runs out.
    std::optional<Position> next();

    std::uint64_t steps() const noexcept { return steps_; }
    std::uint64_t produced() const noexcept { return produced_; }
    const std::vector<std::uint8_t>& visited() const noexcept { return visited_; }

private:
    std::uint32_t rows_, cols_;
    unsigned row_width_, col_width_;
    std::uint64_t target_;
    Lfsr row_reg_, col_reg_;
    std::uint32_t row_state_, col_state_;
    std::uint64_t steps_ = 0;
    std::uint64_t produced_ = 0;
    std::vector<std::uint8_t> visited_;
};

/// round((1 - sparsity) * rows * cols)
std::uint64_t kept_count_for(std::uint32_t rows, std::uint32_t cols, double sparsity);

Mask generate_mask(std::uint32_t rows, std::uint32_t cols, double sparsity, const LfsrSpec& row_spec,
                   const LfsrSpec& col_spec);
Mask generate_mask_count(std::uint32_t rows, std::uint32_t cols, std::uint64_t kept, const LfsrSpec& row_spec,
                         const LfsrSpec& col_spec);

/// Widths max(4, ceil(log2 n) + 2); the column width is bumped until it is
/// coprime with the row width so the joint period is the product of the two.
/// Seeds: row = seed truncated to width (0 -> 1), col = row ^ 0x5A5A5A
/// truncated (0 -> 1).
std::pair<LfsrSpec, LfsrSpec> default_mask_specs(std::uint32_t rows, std::uint32_t cols, std::uint32_t seed);

unsigned default_width_for(std::uint32_t n_items);

struct MaskStats {
    double achieved_sparsity = 0.0;
    std::vector<std::uint32_t> row_counts;
    std::vector<std::uint32_t> col_counts;
    std::uint32_t row_min = 0, row_max = 0;
    double row_mean = 0.0, row_cv = 0.0;
    std::uint32_t col_min = 0, col_max = 0;
    double col_mean = 0.0, col_cv = 0.0;
    std::uint64_t steps_consumed = 0;
    /// steps_consumed / kept; 1.0 means no duplicate was ever proposed.
    double steps_per_kept = 0.0;
};

MaskStats mask_stats(const Mask& mask);

}  // namespace lfsrprune
