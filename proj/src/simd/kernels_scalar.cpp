#include "patsvd/simd/kernels.hpp"

namespace patsvd::simd::detail {

namespace {

void leapfrog(double* prev, const double* cur, const double* lower, const double* upper, const double* diag,
              std::size_t n) {
    if (n == 0) return;
    if (n == 1) {
        prev[0] = 2.0 * cur[0] - prev[0] - diag[0] * cur[0];
        return;
    }
    prev[0] = 2.0 * cur[0] - prev[0] + upper[0] * cur[1] - diag[0] * cur[0];
    for (std::size_t j = 1; j + 1 < n; ++j)
        prev[j] = 2.0 * cur[j] - prev[j] + lower[j] * cur[j - 1] + upper[j] * cur[j + 1] - diag[j] * cur[j];
    prev[n - 1] = 2.0 * cur[n - 1] - prev[n - 1] + lower[n - 1] * cur[n - 2] - diag[n - 1] * cur[n - 1];
}

std::complex<double> cdot(const std::complex<double>* a, const std::complex<double>* b, std::size_t n) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
    }
    return {re, im};
}

std::complex<double> cdot_real(const std::complex<double>* a, const double* w, std::size_t n) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * w[i];
        im += a[i].imag() * w[i];
    }
    return {re, im};
}

double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

} // namespace

const KernelTable scalar_table{&leapfrog, &cdot, &cdot_real, &dot};

} // namespace patsvd::simd::detail
