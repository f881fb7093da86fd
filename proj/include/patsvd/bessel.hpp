#pragma once

#include <functional>
#include <vector>

namespace patsvd::bessel {

/// Cylindrical Bessel function J_n(x) of integer order, x >= 0.
/// Power series for small x, Miller's normalised backward recurrence otherwise.
double cyl_j(int n, double x);
/// d/dx J_n(x).
double cyl_j_prime(int n, double x);

/// Spherical Bessel function j_l(x), x >= 0.
double sph_j(int l, double x);
/// d/dx j_l(x).
double sph_j_prime(int l, double x);

/// The first `count` roots of `f` in (x_start, inf), bracketed by scanning
/// with `step` and refined by bisection to machine precision.
/// Throws NumericalError if a bracket cannot be found before `x_limit`.
std::vector<double> roots(const std::function<double(double)>& f, int count, double x_start,
                          double step = 0.05, double x_limit = 1e4);

} // namespace patsvd::bessel
