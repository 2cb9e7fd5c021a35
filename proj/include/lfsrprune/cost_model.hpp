#pragma once

// Linear energy proxy over access traces.
//
// Model memories (weights, indices, pointers) are priced per bit fetched at
// dram_read per 32-bit word, so a 4-bit index costs an eighth of a 32-bit
// word. Input/output buffer accesses cost sram_read / sram_write each, MACs
// cost `mac`, and every register step of an LFSR costs `lfsr_step`.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lfsrprune/kernels.hpp"
#include "lfsrprune/sparse_codec.hpp"

namespace lfsrprune {

/// Picojoules per operation.
struct CostTable {
    double sram_read = 5.0;
    double sram_write = 5.0;
    double dram_read = 640.0;  // per 32-bit word
    double mac = 0.9;
    double lfsr_step = 0.1;
    double register_op = 0.1;
    /// Memory bank size. Recorded in reports; the linear model ignores it.
    double bank_bytes = 1024.0;

    /// Throws ValidationError on a negative or non-finite entry.
    void validate() const;
    CostTable scaled(double factor) const;
};

/// `key = value` lines; '#' starts a comment. Unknown keys are rejected. When
/// lfsr_step is absent it follows register_op.
CostTable parse_cost_table(std::string_view text);
CostTable load_cost_table(const std::filesystem::path& path);
std::string to_text(const CostTable& table);

struct EnergyBreakdown {
    double weight_mem = 0.0;
    double index_mem = 0.0;
    double pointer_mem = 0.0;
    double input_buffer = 0.0;
    double output_buffer = 0.0;
    double mac = 0.0;
    double lfsr = 0.0;

    double total() const noexcept {
        return weight_mem + index_mem + pointer_mem + input_buffer + output_buffer + mac + lfsr;
    }
};

EnergyBreakdown energy_breakdown(const AccessTrace& trace, const CostTable& table);
inline double energy(const AccessTrace& trace, const CostTable& table) {
    return energy_breakdown(trace, table).total();
}

struct DesignCost {
    AccessTrace trace;
    std::uint64_t footprint_bits = 0;
};

struct CostReport {
    EnergyBreakdown proposed_energy;
    EnergyBreakdown baseline_energy;
    std::uint64_t proposed_bits = 0;
    std::uint64_t baseline_bits = 0;
    double energy_saving_pct = 0.0;     // 100 (baseline - proposed) / baseline
    double footprint_saving_pct = 0.0;
};

/// Throws ValidationError when the baseline energy or footprint is zero.
CostReport compare(const DesignCost& proposed, const DesignCost& baseline, const CostTable& table);

/// One grid point of a comparison sweep.
struct CostPoint {
    std::string shape;  // e.g. "300x100"
    double sparsity = 0.0;
    unsigned index_bits = 0;
    double alpha = 1.0;
    CostReport report;
};

std::string cost_csv_header();
std::string to_csv(const CostPoint& point);

/// Table shaped like a power/area results table: one block per design and
/// metric, sparsity rows by index-bit-width columns, per shape.
std::string format_cost_table(const std::vector<CostPoint>& points);

}  // namespace lfsrprune
