#pragma once

// Dense inner-loop kernels with a scalar reference and SIMD variants.
//
// Every elementwise kernel performs the same IEEE operations in the same
// order in every variant, so results are bitwise identical across variants.
// Only `dot` is a reduction; its variants agree to rounding, and it is kept
// out of the simulation and eigensolver paths for that reason.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace pinsync::kernels {

struct KernelTable {
    const char* name;
    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // out[i] = x[i] + a * k[i]
    void (*add_scaled)(const double* x, double a, const double* k, double* out, std::size_t n);
    // x[i] += (h / 6) * (k1[i] + 2 k2[i] + 2 k3[i] + k4[i])
    void (*rk4_combine)(double* x, const double* k1, const double* k2, const double* k3,
                        const double* k4, double h, std::size_t n);
    // (x[i], y[i]) <- (c x[i] - s y[i], s x[i] + c y[i])
    void (*rotate)(double* x, double* y, double c, double s, std::size_t n);
    double (*dot)(const double* x, const double* y, std::size_t n);
};

const KernelTable& scalar_table();

// Null when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_table();

// Every variant usable on this machine, scalar first.
std::vector<const KernelTable*> available_tables();

// The table used by the library. Chosen once from the PINSYNC_SIMD
// environment variable ("scalar", "avx2", "auto"; default auto).
const KernelTable& active();

// Forces a variant by name. Returns false when it is unavailable.
bool select(std::string_view name);

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    active().axpy(a, x.data(), y.data(), y.size());
}

inline void add_scaled(std::span<const double> x, double a, std::span<const double> k,
                       std::span<double> out) {
    active().add_scaled(x.data(), a, k.data(), out.data(), out.size());
}

inline void rk4_combine(std::span<double> x, std::span<const double> k1,
                        std::span<const double> k2, std::span<const double> k3,
                        std::span<const double> k4, double h) {
    active().rk4_combine(x.data(), k1.data(), k2.data(), k3.data(), k4.data(), h, x.size());
}

inline void rotate(std::span<double> x, std::span<double> y, double c, double s) {
    active().rotate(x.data(), y.data(), c, s, x.size());
}

inline double dot(std::span<const double> x, std::span<const double> y) {
    return active().dot(x.data(), y.data(), x.size());
}

}  // namespace pinsync::kernels
