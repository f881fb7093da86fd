#pragma once

#include <compare>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "patsvd/radial_eigensolver.hpp"
#include "patsvd/radial_grid.hpp"
#include "patsvd/speed_profile.hpp"

namespace patsvd {

using complex = std::complex<double>;

/// (k, l) in 2D with l of either sign; (k, l, m) in 3D with |m| <= l.
struct ModeIndex {
    int dimension = 2;
    int l = 0;
    int k = 1;
    int m = 0; // azimuthal order, 3D only

    static ModeIndex planar(int l, int k) { return {2, l, k, 0}; }
    static ModeIndex spatial(int l, int m, int k);

    std::string label() const;
    auto operator<=>(const ModeIndex&) const = default;
};

/// Eigenfunction of c(|x|)Δ on the unit ball: radial factor times e^{ilθ}/√(2π)
/// (2D) or Y_l^m (3D). Radial factors are shared between ±l and across m.
struct Mode {
    ModeIndex index;
    std::shared_ptr<const RadialMode> radial;

    double mu() const noexcept { return radial->mu; }
    BoundaryCondition bc() const noexcept { return radial->bc; }
};

/// Angular sample positions and weights on S^1 (uniform) or S^2
/// (Gauss–Legendre in cos θ × uniform azimuth).
class AngularGrid {
public:
    static AngularGrid circle(std::size_t n_theta);
    static AngularGrid sphere(std::size_t n_colat, std::size_t n_azim);

    int dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return weights_.size(); }
    std::size_t n_theta() const noexcept { return n_theta_; }
    std::size_t n_colat() const noexcept { return colat_.size(); }
    std::size_t n_azim() const noexcept { return n_theta_; }

    /// Polar angle (2D) or azimuth (3D) of sample a.
    double azimuth(std::size_t a) const noexcept;
    /// Colatitude of sample a (3D only; 0 in 2D).
    double colatitude(std::size_t a) const noexcept;
    double weight(std::size_t a) const noexcept { return weights_[a]; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const double> colatitudes() const noexcept { return colat_; }

    friend bool operator==(const AngularGrid& a, const AngularGrid& b) {
        return a.dimension_ == b.dimension_ && a.n_theta_ == b.n_theta_ && a.colat_.size() == b.colat_.size();
    }

private:
    int dimension_ = 2;
    std::size_t n_theta_ = 0; // azimuth count
    std::vector<double> colat_;
    std::vector<double> weights_;
};

/// Largest |l| the grid integrates exactly against another frequency of the
/// same bound: 2D trapezoid needs n_theta >= 2 L + 2.
int angular_bandlimit(const AngularGrid& grid);

/// Function sampled on RadialGrid × AngularGrid, radial index outer.
class GridFunction {
public:
    GridFunction(RadialGrid radial, AngularGrid angular);
    GridFunction(RadialGrid radial, AngularGrid angular, std::vector<complex> samples);

    int dimension() const noexcept { return angular_.dimension(); }
    const RadialGrid& radial() const noexcept { return radial_; }
    const AngularGrid& angular() const noexcept { return angular_; }

    complex& at(std::size_t j, std::size_t a) { return samples_[j * angular_.size() + a]; }
    const complex& at(std::size_t j, std::size_t a) const { return samples_[j * angular_.size() + a]; }
    std::span<complex> samples() noexcept { return samples_; }
    std::span<const complex> samples() const noexcept { return samples_; }
    std::span<const complex> ring(std::size_t j) const { return {samples_.data() + j * angular_.size(), angular_.size()}; }

    bool same_grid(const GridFunction& other) const {
        return radial_ == other.radial_ && angular_ == other.angular_;
    }

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(complex s);

private:
    RadialGrid radial_;
    AngularGrid angular_;
    std::vector<complex> samples_;
};

struct Truncation {
    double mu_max = 0.0; // 0 when the set is rectangular
    int l_max = 0;
    int k_max = 0;
};

struct ModalCoefficients {
    std::map<ModeIndex, complex> entries;
    Truncation truncation;

    complex get(const ModeIndex& i) const {
        auto it = entries.find(i);
        return it == entries.end() ? complex{} : it->second;
    }
    double l2_norm() const;
    double l1_norm() const;
};

/// Quadrature weight of node j, a: w_a r_j^{n-1} dr / c(r_j).
std::vector<double> volume_weights(const RadialGrid& radial, const AngularGrid& angular,
                                   const SoundSpeedProfile& profile);

/// Radial factor at arbitrary r in (0, 1]: piecewise linear between cell
/// centres, the extrapolated boundary value at r = 1, and r^l-consistent
/// behaviour below the first centre.
double radial_value(const RadialMode& mode, double r);

/// Angular factor e^{ilθ}/√(2π) (2D) or Y_l^m(colatitude, azimuth) (3D).
complex angular_factor(const ModeIndex& index, double colatitude, double azimuth);

/// φ(r, angles). In 2D `colatitude` is ignored. Throws DomainError for r <= 0 or r > 1.
complex evaluate_mode(const Mode& mode, double r, double azimuth, double colatitude = 0.0);

/// Samples a mode on a grid whose radial grid matches the mode's.
GridFunction sample_mode(const Mode& mode, const RadialGrid& radial, const AngularGrid& angular);

/// ∫_B f conj(g) c^{-1} dx by the product rule. Throws ShapeError on grid mismatch.
complex weighted_inner_product(const GridFunction& f, const GridFunction& g, const SoundSpeedProfile& profile);

/// ⟨f, φ⟩ for every mode; in 2D the angular integral is a discrete Fourier sum per ring.
ModalCoefficients project(const GridFunction& f, std::span<const Mode> modes, const SoundSpeedProfile& profile);

/// Σ X φ on the grid. Throws IndexError if a coefficient has no mode.
GridFunction synthesize(const ModalCoefficients& coeffs, std::span<const Mode> modes, const RadialGrid& radial,
                        const AngularGrid& angular);

/// Every mode with mu <= mu_max (both signs of l in 2D, every m in 3D), sorted
/// by (mu, |l|, l, m, k).
std::vector<Mode> enumerate_modes(const SoundSpeedProfile& profile, const RadialGrid& grid, BoundaryCondition bc,
                                  int dimension, double mu_max);

/// |l| <= l_max, k <= k_max, sorted as above.
std::vector<Mode> enumerate_modes_rect(const SoundSpeedProfile& profile, const RadialGrid& grid, BoundaryCondition bc,
                                       int dimension, int l_max, int k_max);

/// The `count` lowest-frequency modes.
std::vector<Mode> lowest_modes(const SoundSpeedProfile& profile, const RadialGrid& grid, BoundaryCondition bc,
                               int dimension, std::size_t count);

/// Largest |l| in a mode list.
int max_angular_index(std::span<const Mode> modes);

/// Smallest angular grid on which every pair of modes is integrated exactly.
AngularGrid angular_grid_for(std::span<const Mode> modes);

/// G[i][j] = <phi_i, phi_j> on the modes' radial grid and angular_grid_for(modes).
/// Hermitian by construction.
std::vector<std::vector<complex>> gram_matrix(std::span<const Mode> modes, const SoundSpeedProfile& profile);

} // namespace patsvd
