#include "kernels_internal.hpp"

namespace lfsrprune::simd::scalar {

void axpy_f64(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpy_f32_f64(double a, const float* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * static_cast<double>(x[i]);
}

void axpy_i8_i32(std::int32_t a, const std::int8_t* x, std::int32_t* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * static_cast<std::int32_t>(x[i]);
}

double dot_f64(const double* a, const double* b, std::size_t n) {
    double p[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) p[i % 4] += a[i] * b[i];
    return (p[0] + p[1]) + (p[2] + p[3]);
}

void relu_f64(double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] > 0.0 ? y[i] : 0.0;
}

}  // namespace lfsrprune::simd::scalar
