#include "patsvd/spherical_harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "patsvd/error.hpp"

namespace patsvd {

std::vector<double> normalized_legendre_column(int l_max, int m, double x) {
    if (m < 0 || l_max < m) throw DomainError("normalized_legendre_column needs 0 <= m <= l_max");
    std::vector<double> p(static_cast<std::size_t>(l_max - m + 1));
    const double s = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
    double pmm = std::sqrt(1.0 / (4.0 * std::numbers::pi));
    for (int i = 1; i <= m; ++i) pmm *= -std::sqrt((2.0 * i + 1.0) / (2.0 * i)) * s;
    p[0] = pmm;
    if (l_max == m) return p;
    p[1] = std::sqrt(2.0 * m + 3.0) * x * pmm;
    for (int l = m + 2; l <= l_max; ++l) {
        const double dl = l;
        const double a = std::sqrt((4.0 * dl * dl - 1.0) / (dl * dl - m * m));
        const double b = std::sqrt(((dl - 1.0) * (dl - 1.0) - m * m) / (4.0 * (dl - 1.0) * (dl - 1.0) - 1.0));
        const auto i = static_cast<std::size_t>(l - m);
        p[i] = a * (x * p[i - 1] - b * p[i - 2]);
    }
    return p;
}

std::complex<double> spherical_harmonic(int l, int m, double colatitude, double azimuth) {
    if (l < 0 || std::abs(m) > l)
        throw DomainError("spherical harmonic needs |m| <= l, got l = " + std::to_string(l) + ", m = " +
                          std::to_string(m));
    const int am = std::abs(m);
    const double p = normalized_legendre_column(l, am, std::cos(colatitude)).back();
    const std::complex<double> y = p * std::complex<double>(std::cos(am * azimuth), std::sin(am * azimuth));
    if (m >= 0) return y;
    // Y_l^{-m} = (-1)^m conj(Y_l^m)
    return (am % 2 == 0 ? 1.0 : -1.0) * std::conj(y);
}

} // namespace patsvd
