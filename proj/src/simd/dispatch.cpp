#include <atomic>
#include <cstdlib>
#include <cstring>

#include "patsvd/error.hpp"
#include "patsvd/simd/kernels.hpp"

namespace patsvd::simd {

namespace {

bool cpu_has_avx2() {
#if defined(PATSVD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Level initial_level() {
    const Level best = detected_level();
    if (const char* env = std::getenv("PATSVD_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Level::Scalar;
        if (std::strcmp(env, "avx2") == 0 && best == Level::Avx2) return Level::Avx2;
    }
    return best;
}

std::atomic<Level>& current() {
    static std::atomic<Level> level{initial_level()};
    return level;
}

} // namespace

std::string to_string(Level level) { return level == Level::Avx2 ? "avx2" : "scalar"; }

Level detected_level() {
    static const Level level = cpu_has_avx2() ? Level::Avx2 : Level::Scalar;
    return level;
}

Level active_level() { return current().load(std::memory_order_relaxed); }

void set_level(Level level) {
    if (level == Level::Avx2 && detected_level() != Level::Avx2)
        throw ConfigError("AVX2 kernels requested but the CPU does not support AVX2+FMA");
    current().store(level, std::memory_order_relaxed);
}

const KernelTable& kernels(Level level) {
#if defined(PATSVD_HAVE_AVX2)
    if (level == Level::Avx2) return detail::avx2_table;
#endif
    (void)level;
    return detail::scalar_table;
}

const KernelTable& kernels() { return kernels(active_level()); }

} // namespace patsvd::simd
