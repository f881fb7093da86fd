#pragma once

// Data-parallel inner loops with a scalar reference implementation and an
// AVX2/FMA variant chosen at runtime. Every variant must agree with the scalar
// path to rounding (see tests/unit/test_kernels.cpp).

#include <complex>
#include <cstddef>
#include <string>

namespace patsvd::simd {

enum class Level { Scalar, Avx2 };

std::string to_string(Level level);

struct KernelTable {
    /// One explicit leapfrog step of a three-point operator, in place over `prev`:
    ///   prev[j] <- 2 cur[j] - prev[j] + lower[j] cur[j-1] + upper[j] cur[j+1] - diag[j] cur[j]
    /// cur[-1] and cur[n] are taken as zero.
    void (*leapfrog)(double* prev, const double* cur, const double* lower, const double* upper, const double* diag,
                     std::size_t n);

    /// sum_i a[i] * conj(b[i])
    std::complex<double> (*cdot)(const std::complex<double>* a, const std::complex<double>* b, std::size_t n);

    /// sum_i a[i] * w[i] with real w
    std::complex<double> (*cdot_real)(const std::complex<double>* a, const double* w, std::size_t n);

    /// sum_i x[i] * y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);
};

/// Best level this CPU supports (ignores overrides).
Level detected_level();
/// Level in use: detected_level() unless PATSVD_SIMD=scalar|avx2 or set_level() says otherwise.
Level active_level();
/// Forces a level; throws ConfigError if the CPU cannot run it.
void set_level(Level level);

const KernelTable& kernels();
const KernelTable& kernels(Level level);

namespace detail {
extern const KernelTable scalar_table;
#if defined(PATSVD_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
} // namespace detail

} // namespace patsvd::simd
