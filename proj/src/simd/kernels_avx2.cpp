// Compiled with -mavx2 -mfma; only reached when the CPU reports both.

#include <immintrin.h>

#include "patsvd/simd/kernels.hpp"

namespace patsvd::simd::detail {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void leapfrog(double* prev, const double* cur, const double* lower, const double* upper, const double* diag,
              std::size_t n) {
    if (n < 2) {
        if (n == 1) prev[0] = 2.0 * cur[0] - prev[0] - diag[0] * cur[0];
        return;
    }
    prev[0] = 2.0 * cur[0] - prev[0] + upper[0] * cur[1] - diag[0] * cur[0];
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t j = 1;
    for (; j + 4 < n; j += 4) {
        const __m256d c = _mm256_loadu_pd(cur + j);
        const __m256d cm = _mm256_loadu_pd(cur + j - 1);
        const __m256d cp = _mm256_loadu_pd(cur + j + 1);
        __m256d acc = _mm256_sub_pd(_mm256_mul_pd(two, c), _mm256_loadu_pd(prev + j));
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(lower + j), cm, acc);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(upper + j), cp, acc);
        acc = _mm256_fnmadd_pd(_mm256_loadu_pd(diag + j), c, acc);
        _mm256_storeu_pd(prev + j, acc);
    }
    for (; j + 1 < n; ++j)
        prev[j] = 2.0 * cur[j] - prev[j] + lower[j] * cur[j - 1] + upper[j] * cur[j + 1] - diag[j] * cur[j];
    prev[n - 1] = 2.0 * cur[n - 1] - prev[n - 1] + lower[n - 1] * cur[n - 2] - diag[n - 1] * cur[n - 1];
}

std::complex<double> cdot(const std::complex<double>* a, const std::complex<double>* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    __m256d same = _mm256_setzero_pd();  // ar*br, ai*bi
    __m256d cross = _mm256_setzero_pd(); // ar*bi, ai*br
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        same = _mm256_fmadd_pd(va, vb, same);
        cross = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0b0101), cross);
    }
    alignas(32) double s[4];
    alignas(32) double x[4];
    _mm256_store_pd(s, same);
    _mm256_store_pd(x, cross);
    double re = (s[0] + s[1]) + (s[2] + s[3]);
    double im = (x[1] - x[0]) + (x[3] - x[2]);
    for (; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
    }
    return {re, im};
}

std::complex<double> cdot_real(const std::complex<double>* a, const double* w, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d ww = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w + i)), 0x50);
        acc = _mm256_fmadd_pd(va, ww, acc);
    }
    alignas(32) double s[4];
    _mm256_store_pd(s, acc);
    double re = s[0] + s[2];
    double im = s[1] + s[3];
    for (; i < n; ++i) {
        re += a[i].real() * w[i];
        im += a[i].imag() * w[i];
    }
    return {re, im};
}

double dot(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

} // namespace

const KernelTable avx2_table{&leapfrog, &cdot, &cdot_real, &dot};

} // namespace patsvd::simd::detail
