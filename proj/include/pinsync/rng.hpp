#pragma once

#include <cstdint>
#include <random>

namespace pinsync {

// Seedable 64-bit generator. The engine's output sequence is fixed by the
// C++ standard, and the derived draws below avoid the implementation-defined
// std:: distributions, so streams are identical across platforms.
class Rng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01();

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, bound), bound > 0, without modulo bias.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
};

}  // namespace pinsync
