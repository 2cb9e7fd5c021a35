#include <immintrin.h>

#include "kernels_internal.hpp"

namespace lfsrprune::simd::avx2 {

void axpy_f64(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void axpy_f32_f64(double a, const float* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xd = _mm256_cvtps_pd(_mm_loadu_ps(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, xd)));
    }
    for (; i < n; ++i) y[i] += a * static_cast<double>(x[i]);
}

void axpy_i8_i32(std::int32_t a, const std::int8_t* x, std::int32_t* y, std::size_t n) {
    const __m256i va = _mm256_set1_epi32(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256i xi = _mm256_cvtepi8_epi32(_mm_loadl_epi64(reinterpret_cast<const __m128i*>(x + i)));
        __m256i* dst = reinterpret_cast<__m256i*>(y + i);
        _mm256_storeu_si256(dst, _mm256_add_epi32(_mm256_loadu_si256(dst), _mm256_mullo_epi32(va, xi)));
    }
    for (; i < n; ++i) y[i] += a * static_cast<std::int32_t>(x[i]);
}

double dot_f64(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    alignas(32) double p[4];
    _mm256_store_pd(p, acc);
    // Tail lanes line up with i % 4 because i is a multiple of 4 here.
    for (std::size_t k = 0; i < n; ++i, ++k) p[k] += a[i] * b[i];
    return (p[0] + p[1]) + (p[2] + p[3]);
}

void relu_f64(double* y, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    // max_pd(v, zero) yields v only when v > 0, matching the scalar select
    // for -0.0 and NaN inputs.
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(y + i), zero));
    for (; i < n; ++i) y[i] = y[i] > 0.0 ? y[i] : 0.0;
}

}  // namespace lfsrprune::simd::avx2
