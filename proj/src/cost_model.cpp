#include "lfsrprune/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "lfsrprune/error.hpp"

namespace lfsrprune {

void CostTable::validate() const {
    for (double v : {sram_read, sram_write, dram_read, mac, lfsr_step, register_op, bank_bytes}) {
        if (!std::isfinite(v) || v < 0.0) throw ValidationError("cost table entries must be finite and >= 0");
    }
}

CostTable CostTable::scaled(double f) const {
    return {sram_read * f, sram_write * f, dram_read * f, mac * f, lfsr_step * f, register_op * f, bank_bytes};
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

CostTable parse_cost_table(std::string_view text) {
    CostTable table;
    bool lfsr_given = false;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw FormatError("cost table line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        double v = 0.0;
        try {
            std::size_t used = 0;
            v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw FormatError("cost table line " + std::to_string(line_no) + ": bad number '" + value + "'");
        }
        if (key == "sram_read") table.sram_read = v;
        else if (key == "sram_write") table.sram_write = v;
        else if (key == "dram_read") table.dram_read = v;
        else if (key == "mac") table.mac = v;
        else if (key == "lfsr_step") { table.lfsr_step = v; lfsr_given = true; }
        else if (key == "register_op") table.register_op = v;
        else if (key == "bank_bytes") table.bank_bytes = v;
        else throw FormatError("cost table line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!lfsr_given) table.lfsr_step = table.register_op;
    table.validate();
    return table;
}

CostTable load_cost_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_cost_table(buf.str());
}

std::string to_text(const CostTable& t) {
    std::ostringstream out;
    out << "sram_read = " << t.sram_read << "\nsram_write = " << t.sram_write << "\ndram_read = " << t.dram_read
        << "\nmac = " << t.mac << "\nlfsr_step = " << t.lfsr_step << "\nregister_op = " << t.register_op
        << "\nbank_bytes = " << t.bank_bytes << '\n';
    return out.str();
}

EnergyBreakdown energy_breakdown(const AccessTrace& t, const CostTable& c) {
    const double per_bit = c.dram_read / 32.0;
    EnergyBreakdown e;
    e.weight_mem = static_cast<double>(t.weight_mem_reads) * t.value_bits * per_bit;
    e.index_mem = static_cast<double>(t.index_mem_reads) * t.index_bits * per_bit;
    e.pointer_mem = static_cast<double>(t.pointer_mem_reads) * static_cast<double>(kPointerBits) * per_bit;
    e.input_buffer = static_cast<double>(t.input_buffer_reads) * c.sram_read;
    e.output_buffer = static_cast<double>(t.output_buffer_reads) * c.sram_read +
                      static_cast<double>(t.output_buffer_writes) * c.sram_write;
    e.mac = static_cast<double>(t.mac_ops) * c.mac;
    e.lfsr = static_cast<double>(t.lfsr_steps) * c.lfsr_step;
    return e;
}

CostReport compare(const DesignCost& proposed, const DesignCost& baseline, const CostTable& table) {
    table.validate();
    CostReport r;
    r.proposed_energy = energy_breakdown(proposed.trace, table);
    r.baseline_energy = energy_breakdown(baseline.trace, table);
    r.proposed_bits = proposed.footprint_bits;
    r.baseline_bits = baseline.footprint_bits;
    const double eb = r.baseline_energy.total();
    if (eb == 0.0) throw ValidationError("baseline energy is zero; saving undefined");
    if (r.baseline_bits == 0) throw ValidationError("baseline footprint is zero; saving undefined");
    r.energy_saving_pct = 100.0 * (eb - r.proposed_energy.total()) / eb;
    r.footprint_saving_pct = 100.0 * (static_cast<double>(r.baseline_bits) - static_cast<double>(r.proposed_bits)) /
                             static_cast<double>(r.baseline_bits);
    return r;
}

std::string cost_csv_header() {
    return "shape,sparsity,index_bits,alpha,proposed_energy_pj,baseline_energy_pj,energy_saving_pct,"
           "proposed_bits,baseline_bits,footprint_ratio,footprint_saving_pct";
}

std::string to_csv(const CostPoint& p) {
    std::ostringstream out;
    out << std::setprecision(10) << p.shape << ',' << p.sparsity << ',' << p.index_bits << ',' << p.alpha << ','
        << p.report.proposed_energy.total() << ',' << p.report.baseline_energy.total() << ','
        << p.report.energy_saving_pct << ',' << p.report.proposed_bits << ',' << p.report.baseline_bits << ','
        << static_cast<double>(p.report.baseline_bits) / static_cast<double>(p.report.proposed_bits) << ','
        << p.report.footprint_saving_pct;
    return out.str();
}

std::string format_cost_table(const std::vector<CostPoint>& points) {
    std::vector<std::string> shapes;
    std::set<double> sparsities;
    std::set<unsigned> bits;
    std::map<std::tuple<std::string, double, unsigned>, const CostPoint*> at;
    for (const CostPoint& p : points) {
        if (std::find(shapes.begin(), shapes.end(), p.shape) == shapes.end()) shapes.push_back(p.shape);
        sparsities.insert(p.sparsity);
        bits.insert(p.index_bits);
        at[{p.shape, p.sparsity, p.index_bits}] = &p;
    }

    struct Block {
        const char* title;
        double (*get)(const CostPoint&);
    };
    const Block blocks[] = {
        {"Proposed energy (pJ)", [](const CostPoint& p) { return p.report.proposed_energy.total(); }},
        {"Baseline energy (pJ)", [](const CostPoint& p) { return p.report.baseline_energy.total(); }},
        {"Energy saving (%)", [](const CostPoint& p) { return p.report.energy_saving_pct; }},
        {"Proposed storage (bits)", [](const CostPoint& p) { return static_cast<double>(p.report.proposed_bits); }},
        {"Baseline storage (bits)", [](const CostPoint& p) { return static_cast<double>(p.report.baseline_bits); }},
        {"Storage saving (%)", [](const CostPoint& p) { return p.report.footprint_saving_pct; }},
    };

    constexpr int kCol = 14;
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    out << std::left << std::setw(26) << "Sparsity \\ index bits" << std::right;
    for (const auto& shape : shapes) {
        for (unsigned b : bits) out << std::setw(kCol) << (shape + "/" + std::to_string(b) + "b");
    }
    out << '\n';
    for (const Block& block : blocks) {
        out << block.title << '\n';
        for (double sp : sparsities) {
            std::ostringstream label;
            label << "  " << std::setprecision(0) << std::fixed << sp * 100.0 << "%";
            out << std::left << std::setw(26) << label.str() << std::right;
            for (const auto& shape : shapes) {
                for (unsigned b : bits) {
                    auto it = at.find({shape, sp, b});
                    if (it == at.end()) {
                        out << std::setw(kCol) << "-";
                    } else {
                        out << std::setw(kCol) << block.get(*it->second);
                    }
                }
            }
            out << '\n';
        }
    }
    return out.str();
}

}  // namespace lfsrprune
