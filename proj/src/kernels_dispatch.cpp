#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"
#include "pinsync/kernels.hpp"

namespace pinsync::kernels {

namespace {

const KernelTable kScalar{"scalar", scalar::axpy, scalar::add_scaled, scalar::rk4_combine,
                          scalar::rotate, scalar::dot};

#if defined(PINSYNC_HAVE_AVX2)
const KernelTable kAvx2{"avx2", avx2::axpy, avx2::add_scaled, avx2::rk4_combine,
                        avx2::rotate, avx2::dot};

bool cpu_has_avx2() {
#if defined(__GNUC__) || defined(__clang__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}
#endif

const KernelTable* initial_table() {
    const char* env = std::getenv("PINSYNC_SIMD");
    const std::string wanted = env ? env : "auto";
    if (wanted == "scalar") return &kScalar;
    if (const KernelTable* t = avx2_table()) return t;
    return &kScalar;
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(PINSYNC_HAVE_AVX2)
    static const bool supported = cpu_has_avx2();
    return supported ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

std::vector<const KernelTable*> available_tables() {
    std::vector<const KernelTable*> out{&kScalar};
    if (const KernelTable* t = avx2_table()) out.push_back(t);
    return out;
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

bool select(std::string_view name) {
    for (const KernelTable* t : available_tables()) {
        if (name == t->name) {
            current().store(t, std::memory_order_relaxed);
            return true;
        }
    }
    if (name == "auto") {
        current().store(available_tables().back(), std::memory_order_relaxed);
        return true;
    }
    return false;
}

}  // namespace pinsync::kernels
