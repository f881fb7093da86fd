#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "patsvd/radial_grid.hpp"
#include "patsvd/speed_profile.hpp"
#include "patsvd/tridiag_eigen.hpp"

namespace patsvd {

enum class BoundaryCondition { Neumann, Dirichlet };

std::string to_string(BoundaryCondition bc);
BoundaryCondition parse_boundary_condition(const std::string& s);

/// Weyl classification of the singular endpoint r = 0.
enum class EndpointClass { LimitCircle, LimitPoint };

/// LimitCircle iff l == 0, in both 2D and 3D. Throws DomainError for a
/// dimension other than 2 or 3 or negative l.
EndpointClass classify_origin(int dimension, int l);

/// One eigenpair of the radial problem
///     -(r^{n-1} h')' + l(l+n-2) r^{n-3} h = mu^2 r^{n-1} c(r)^{-1} h
/// sampled at the cell centres of a RadialGrid, normalised so that
/// sum_j h_j^2 w(r_j) dr = 1 with w = r^{n-1}/c.
struct RadialMode {
    int dimension = 2;
    int l = 0;
    int k = 1; // 1-based radial index
    double mu = 0.0;
    std::vector<double> values;
    double boundary_value = 0.0;      // h(1)
    double boundary_derivative = 0.0; // h'(1)
    BoundaryCondition bc = BoundaryCondition::Neumann;

    std::size_t n_cells() const noexcept { return values.size(); }
    /// Boundary gain of the forward operator: h(1) under Neumann, h'(1) under Dirichlet.
    double singular_value() const noexcept {
        return bc == BoundaryCondition::Neumann ? boundary_value : boundary_derivative;
    }
};

/// Generalised pencil (K, W) of the conservative cell-centred discretisation.
struct DiscreteOperator {
    SymTridiag stiffness;       // K
    std::vector<double> weight; // diagonal of W, w(r_j) * dr
};

/// Assembles K and W. The face flux r^{n-1} h' vanishes at r = 0, so the origin
/// needs no boundary row in either the limit-point or limit-circle case.
/// Requires at least 8 cells.
DiscreteOperator assemble_discrete_operator(const SoundSpeedProfile& profile, int l, const RadialGrid& grid,
                                            BoundaryCondition bc, int dimension);

/// h^T K h evaluated in flux form (a sum of non-negative terms).
double stiffness_energy(int l, const RadialGrid& grid, BoundaryCondition bc,
                        int dimension, std::span<const double> h);

/// The `count` lowest modes for angular index l, mu strictly increasing in k.
std::vector<RadialMode> solve_radial_modes(const SoundSpeedProfile& profile, int l, std::size_t count,
                                           const RadialGrid& grid, BoundaryCondition bc, int dimension);

/// Number of discrete eigenfrequencies mu <= mu_max for angular index l.
std::size_t count_modes_below(const SoundSpeedProfile& profile, int l, double mu_max, const RadialGrid& grid,
                              BoundaryCondition bc, int dimension);

struct BoundaryData {
    double value = 0.0;      // h(1)
    double derivative = 0.0; // h'(1)
};

/// h(1) and h'(1) from the outermost sample: under Neumann a Taylor step using the
/// ODE at r = 1, under Dirichlet the ghost-cell flux. Both are second order.
BoundaryData boundary_values(std::span<const double> samples, const RadialGrid& grid, BoundaryCondition bc,
                             const SoundSpeedProfile& profile, int dimension, double mu, int l);

/// Closed-form modes for constant speed c0: cylindrical (2D) or spherical (3D)
/// Bessel functions scaled by sqrt(c0), sampled on `grid`, normalised in the
/// continuum weighted norm and sign-fixed like the discrete modes.
std::vector<RadialMode> bessel_reference_modes(double c0, int l, std::size_t count, BoundaryCondition bc,
                                               int dimension, const RadialGrid& grid);

/// Just the eigenfrequencies of `bessel_reference_modes`.
std::vector<double> bessel_reference_frequencies(double c0, int l, std::size_t count, BoundaryCondition bc,
                                                 int dimension);

struct ConvergenceEstimate {
    int k = 1;
    std::vector<double> mu;      // one per grid size
    std::optional<double> order; // empty when the eigenvalue is exact on every grid
    bool exact = false;
};

/// Richardson estimate from the last three grid sizes (each at least twice the previous).
std::vector<ConvergenceEstimate> convergence_order(const SoundSpeedProfile& profile, int l, BoundaryCondition bc,
                                                   int dimension, std::span<const std::size_t> grid_sizes,
                                                   std::size_t count);

} // namespace patsvd
