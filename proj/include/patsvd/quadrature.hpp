#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace patsvd {

/// n-point Gauss–Legendre rule on [-1, 1]; nodes ascending.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendre gauss_legendre(std::size_t n);

/// Composite 8-point Gauss–Legendre over `panels` equal panels of [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, std::size_t panels = 256);

} // namespace patsvd
