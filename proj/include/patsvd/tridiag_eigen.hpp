#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace patsvd {

/// Real symmetric tridiagonal matrix: `diag` has n entries, `off` has n-1.
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const noexcept { return diag.size(); }
    /// Gershgorin enclosure of the spectrum.
    double lower_bound() const;
    double upper_bound() const;
};

/// Number of eigenvalues strictly below `x` (Sturm sequence / LDL^T inertia).
std::size_t sturm_count(const SymTridiag& t, double x);

/// The k-th smallest eigenvalue (0-based) by bisection on the Sturm count.
double bisect_eigenvalue(const SymTridiag& t, std::size_t k);

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector; // unit Euclidean norm
    int iterations = 0;
};

/// The `count` smallest eigenpairs: bisection for the values, then inverse
/// iteration with re-orthogonalisation against the vectors already found.
/// Throws NumericalError (with iteration diagnostics) if a vector fails to converge.
std::vector<EigenPair> smallest_eigenpairs(const SymTridiag& t, std::size_t count);

/// y = T x
void multiply(const SymTridiag& t, std::span<const double> x, std::span<double> y);

} // namespace patsvd
