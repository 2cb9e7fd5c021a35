#pragma once

// Inner-loop kernels with a scalar reference and ISA-specific variants chosen
// at runtime. Every variant produces bit-identical results to the scalar
// reference: elementwise kernels never fuse multiply and add, and dot() uses
// a fixed four-lane partial-sum layout that the scalar code reproduces.
//
// The active ISA is the best one the CPU supports unless the environment
// variable LFSRPRUNE_ISA=scalar|avx2 says otherwise.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace lfsrprune::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);
std::vector<Isa> supported_isas();

Isa active_isa();
/// Throws UsageError if the CPU (or the build) lacks the ISA.
void set_active_isa(Isa isa);

struct KernelTable {
    // y[i] += a * x[i]
    void (*axpy_f64)(double a, const double* x, double* y, std::size_t n);
    // y[i] += a * double(x[i])
    void (*axpy_f32_f64)(double a, const float* x, double* y, std::size_t n);
    // y[i] += a * int32(x[i])
    void (*axpy_i8_i32)(std::int32_t a, const std::int8_t* x, std::int32_t* y, std::size_t n);
    // ((p0 + p1) + (p2 + p3)) where p_k sums a[i] * b[i] over i % 4 == k
    double (*dot_f64)(const double* a, const double* b, std::size_t n);
    // y[i] = max(y[i], 0)
    void (*relu_f64)(double* y, std::size_t n);
};

/// Kernels for a specific ISA (for equivalence testing); throws if unsupported.
const KernelTable& kernels_for(Isa isa);
const KernelTable& active_kernels();

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    active_kernels().axpy_f64(a, x.data(), y.data(), y.size());
}
inline void axpy(double a, std::span<const float> x, std::span<double> y) {
    active_kernels().axpy_f32_f64(a, x.data(), y.data(), y.size());
}
inline void axpy(std::int32_t a, std::span<const std::int8_t> x, std::span<std::int32_t> y) {
    active_kernels().axpy_i8_i32(a, x.data(), y.data(), y.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
    return active_kernels().dot_f64(a.data(), b.data(), a.size());
}
inline void relu(std::span<double> y) { active_kernels().relu_f64(y.data(), y.size()); }

}  // namespace lfsrprune::simd
