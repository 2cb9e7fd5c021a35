#pragma once

// Raw-pointer kernel entry points. The AVX2 translation unit is compiled with
// -mavx2 and must not instantiate templates shared with the rest of the
// library, so nothing beyond <cstdint> is included here.

#include <cstddef>
#include <cstdint>

namespace lfsrprune::simd::scalar {
void axpy_f64(double a, const double* x, double* y, std::size_t n);
void axpy_f32_f64(double a, const float* x, double* y, std::size_t n);
void axpy_i8_i32(std::int32_t a, const std::int8_t* x, std::int32_t* y, std::size_t n);
double dot_f64(const double* a, const double* b, std::size_t n);
void relu_f64(double* y, std::size_t n);
}  // namespace lfsrprune::simd::scalar

namespace lfsrprune::simd::avx2 {
void axpy_f64(double a, const double* x, double* y, std::size_t n);
void axpy_f32_f64(double a, const float* x, double* y, std::size_t n);
void axpy_i8_i32(std::int32_t a, const std::int8_t* x, std::int32_t* y, std::size_t n);
double dot_f64(const double* a, const double* b, std::size_t n);
void relu_f64(double* y, std::size_t n);
}  // namespace lfsrprune::simd::avx2
