#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"
#include "lfsrprune/error.hpp"
#include "lfsrprune/simd.hpp"

namespace lfsrprune::simd {
namespace {

constexpr KernelTable kScalar = {
    scalar::axpy_f64, scalar::axpy_f32_f64, scalar::axpy_i8_i32, scalar::dot_f64, scalar::relu_f64,
};

#if LFSRPRUNE_HAVE_AVX2
constexpr KernelTable kAvx2 = {
    avx2::axpy_f64, avx2::axpy_f32_f64, avx2::axpy_i8_i32, avx2::dot_f64, avx2::relu_f64,
};
#endif

bool cpu_has_avx2() {
#if LFSRPRUNE_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa initial_isa() {
    if (const char* env = std::getenv("LFSRPRUNE_ISA")) {
        const std::string want(env);
        if (want == "scalar") return Isa::Scalar;
        if (want == "avx2" && cpu_has_avx2()) return Isa::Avx2;
    }
    return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

bool isa_supported(Isa isa) { return isa == Isa::Scalar || (isa == Isa::Avx2 && cpu_has_avx2()); }

std::vector<Isa> supported_isas() {
    std::vector<Isa> out{Isa::Scalar};
    if (cpu_has_avx2()) out.push_back(Isa::Avx2);
    return out;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    if (!isa_supported(isa)) throw UsageError("ISA not supported here: " + std::string(isa_name(isa)));
    current().store(isa, std::memory_order_relaxed);
}

const KernelTable& kernels_for(Isa isa) {
    if (!isa_supported(isa)) throw UsageError("ISA not supported here: " + std::string(isa_name(isa)));
#if LFSRPRUNE_HAVE_AVX2
    if (isa == Isa::Avx2) return kAvx2;
#endif
    return kScalar;
}

const KernelTable& active_kernels() {
#if LFSRPRUNE_HAVE_AVX2
    if (active_isa() == Isa::Avx2) return kAvx2;
#endif
    return kScalar;
}

}  // namespace lfsrprune::simd
