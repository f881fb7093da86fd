#pragma once

#include <complex>
#include <vector>

namespace patsvd {

/// Orthonormal complex spherical harmonic Y_l^m(colatitude, azimuth) with the
/// Condon–Shortley phase. Throws DomainError when |m| > l or l < 0.
std::complex<double> spherical_harmonic(int l, int m, double colatitude, double azimuth);

/// Fully normalised associated Legendre values  P̄_l^m(x) for m >= 0 and
/// l = m..l_max, such that Y_l^m = P̄_l^m(cos θ) e^{imφ}. Stable three-term
/// recurrence in l.
std::vector<double> normalized_legendre_column(int l_max, int m, double x);

} // namespace patsvd
