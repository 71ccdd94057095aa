#pragma once

#include <cstddef>

namespace pinsync::kernels {

namespace scalar {
void axpy(double a, const double* x, double* y, std::size_t n);
void add_scaled(const double* x, double a, const double* k, double* out, std::size_t n);
void rk4_combine(double* x, const double* k1, const double* k2, const double* k3,
                 const double* k4, double h, std::size_t n);
void rotate(double* x, double* y, double c, double s, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
}  // namespace scalar

#if defined(PINSYNC_HAVE_AVX2)
namespace avx2 {
void axpy(double a, const double* x, double* y, std::size_t n);
void add_scaled(const double* x, double a, const double* k, double* out, std::size_t n);
void rk4_combine(double* x, const double* k1, const double* k2, const double* k3,
                 const double* k4, double h, std::size_t n);
void rotate(double* x, double* y, double c, double s, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
}  // namespace avx2
#endif

}  // namespace pinsync::kernels
