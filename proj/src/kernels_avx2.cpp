// Compiled with -mavx2 only (no -mfma): each lane performs the scalar
// reference's multiply and add as separate rounded operations.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace pinsync::kernels::avx2 {

namespace {
constexpr std::size_t kLanes = 4;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
    }
    scalar::axpy(a, x + i, y + i, n - i);
}

void add_scaled(const double* x, double a, const double* k, double* out, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vk = _mm256_loadu_pd(k + i);
        _mm256_storeu_pd(out + i, _mm256_add_pd(vx, _mm256_mul_pd(va, vk)));
    }
    scalar::add_scaled(x + i, a, k + i, out + i, n - i);
}

void rk4_combine(double* x, const double* k1, const double* k2, const double* k3,
                 const double* k4, double h, std::size_t n) {
    const __m256d w = _mm256_set1_pd(h / 6.0);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        __m256d acc = _mm256_add_pd(_mm256_loadu_pd(k1 + i),
                                    _mm256_mul_pd(two, _mm256_loadu_pd(k2 + i)));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(two, _mm256_loadu_pd(k3 + i)));
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(k4 + i));
        _mm256_storeu_pd(x + i, _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_mul_pd(w, acc)));
    }
    scalar::rk4_combine(x + i, k1 + i, k2 + i, k3 + i, k4 + i, h, n - i);
}

void rotate(double* x, double* y, double c, double s, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(x + i, _mm256_sub_pd(_mm256_mul_pd(vc, vx), _mm256_mul_pd(vs, vy)));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_mul_pd(vs, vx), _mm256_mul_pd(vc, vy)));
    }
    scalar::rotate(x + i, y + i, c, s, n - i);
}

double dot(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(x + i + kLanes),
                                                 _mm256_loadu_pd(y + i + kLanes)));
    }
    alignas(32) double lanes[kLanes];
    _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
    double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    return sum + scalar::dot(x + i, y + i, n - i);
}

}  // namespace pinsync::kernels::avx2
