#include <doctest.h>

#include "lfsrprune/cost_model.hpp"
#include "lfsrprune/error.hpp"

using namespace lfsrprune;

namespace {

AccessTrace trace(std::uint64_t w, std::uint64_t idx, std::uint64_t ptr, std::uint64_t in, std::uint64_t out_r,
                  std::uint64_t out_w, std::uint64_t mac, std::uint64_t lfsr, unsigned vbits, unsigned ibits) {
    AccessTrace t;
    t.weight_mem_reads = w;
    t.index_mem_reads = idx;
    t.pointer_mem_reads = ptr;
    t.input_buffer_reads = in;
    t.output_buffer_reads = out_r;
    t.output_buffer_writes = out_w;
    t.mac_ops = mac;
    t.lfsr_steps = lfsr;
    t.value_bits = vbits;
    t.index_bits = ibits;
    t.finalize();
    return t;
}

}  // namespace

TEST_CASE("energy breakdown by hand") {
    CostTable c;
    c.sram_read = 2;
    c.sram_write = 3;
    c.dram_read = 64;  // 2 per bit
    c.mac = 0.5;
    c.lfsr_step = 0.25;
    const EnergyBreakdown e = energy_breakdown(trace(10, 7, 4, 10, 6, 5, 10, 8, 8, 4), c);
    CHECK(e.weight_mem == 10 * 8 * 2);
    CHECK(e.index_mem == 7 * 4 * 2);
    CHECK(e.pointer_mem == 4 * 32 * 2);
    CHECK(e.input_buffer == 20);
    CHECK(e.output_buffer == 6 * 2 + 5 * 3);
    CHECK(e.mac == 5);
    CHECK(e.lfsr == 2);
    CHECK(energy(trace(10, 7, 4, 10, 6, 5, 10, 8, 8, 4), c) == doctest::Approx(e.total()));
}

TEST_CASE("energy is linear in the table") {
    const AccessTrace t = trace(100, 50, 11, 100, 100, 100, 100, 300, 8, 4);
    const CostTable c;
    CHECK(energy(t, c.scaled(3.0)) == doctest::Approx(3.0 * energy(t, c)));
    CHECK(energy(AccessTrace{}, c) == 0.0);
}

TEST_CASE("comparison and savings") {
    const CostTable c;
    const DesignCost p{trace(100, 0, 0, 100, 100, 100, 100, 240, 8, 0), 928};
    const DesignCost b{trace(110, 110, 11, 110, 0, 10, 110, 0, 8, 4), 1672};
    const CostReport r = compare(p, b, c);
    const double ep = energy(p.trace, c), eb = energy(b.trace, c);
    CHECK(r.energy_saving_pct == doctest::Approx(100 * (eb - ep) / eb));
    CHECK(r.footprint_saving_pct == doctest::Approx(100.0 * (1672 - 928) / 1672));
    CHECK(r.proposed_bits == 928);
    CHECK_THROWS_AS(compare(p, {AccessTrace{}, 10}, c), ValidationError);
    CHECK_THROWS_AS(compare(p, {b.trace, 0}, c), ValidationError);
}

TEST_CASE("cost table text form") {
    const CostTable t = parse_cost_table("# comment\nsram_read = 7\n dram_read=320 # trailing\nregister_op = 0.3\n\n");
    CHECK(t.sram_read == 7);
    CHECK(t.dram_read == 320);
    CHECK(t.sram_write == CostTable{}.sram_write);
    CHECK(t.lfsr_step == 0.3);  // follows register_op when absent
    CHECK(parse_cost_table("lfsr_step = 0.05\nregister_op = 1").lfsr_step == 0.05);
    CHECK(parse_cost_table("bank_bytes = 256").bank_bytes == 256);

    const CostTable round = parse_cost_table(to_text(t));
    CHECK(round.sram_read == t.sram_read);
    CHECK(round.lfsr_step == t.lfsr_step);

    CHECK_THROWS_AS(parse_cost_table("leakage = 1"), FormatError);
    CHECK_THROWS_AS(parse_cost_table("mac 1"), FormatError);
    CHECK_THROWS_AS(parse_cost_table("mac = fast"), FormatError);
    CHECK_THROWS_AS(parse_cost_table("mac = -1"), ValidationError);
    CHECK_THROWS_AS(load_cost_table("/nonexistent"), FormatError);
}

TEST_CASE("cost CSV and table rendering") {
    CostPoint p;
    p.shape = "300x100";
    p.sparsity = 0.7;
    p.index_bits = 4;
    p.report = compare({trace(1, 0, 0, 1, 1, 1, 1, 2, 8, 0), 200}, {trace(1, 1, 2, 1, 0, 1, 1, 0, 8, 4), 300}, {});
    CHECK(cost_csv_header() ==
          "shape,sparsity,index_bits,alpha,proposed_energy_pj,baseline_energy_pj,energy_saving_pct,"
          "proposed_bits,baseline_bits,footprint_ratio,footprint_saving_pct");
    CHECK(to_csv(p).rfind("300x100,0.7,4,1,", 0) == 0);
    const std::string table = format_cost_table({p});
    CHECK(table.find("Energy saving (%)") != std::string::npos);
    CHECK(table.find("300x100/4b") != std::string::npos);
    CHECK(table.find("70%") != std::string::npos);
}
