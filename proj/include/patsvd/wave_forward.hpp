#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "patsvd/modal_basis.hpp"
#include "patsvd/speed_profile.hpp"

namespace patsvd {

/// Uniform time sampling of [0, A]: sample j sits at the cell midpoint
/// (j + 1/2) dt and carries weight dt, so A = n_steps * dt exactly.
struct TimeGrid {
    double dt = 0.0;
    std::size_t n_steps = 0;

    double horizon() const noexcept { return dt * static_cast<double>(n_steps); }
    double time(std::size_t j) const noexcept { return (static_cast<double>(j) + 0.5) * dt; }

    /// Horizon A split into the fewest steps with dt * mu_max <= pi/4.
    static TimeGrid for_horizon(double horizon, double mu_max);
    /// Throws ConfigError if dt or n_steps is not positive or dt * mu_max > pi/4.
    void check(double mu_max) const;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// p(theta_a, t_j) on the boundary sphere, time index outer.
class BoundaryTrace {
public:
    BoundaryTrace(AngularGrid angular, TimeGrid time);
    BoundaryTrace(AngularGrid angular, TimeGrid time, std::vector<complex> samples);

    const AngularGrid& angular() const noexcept { return angular_; }
    const TimeGrid& time() const noexcept { return time_; }
    std::size_t n_steps() const noexcept { return time_.n_steps; }

    complex& at(std::size_t t, std::size_t a) { return samples_[t * angular_.size() + a]; }
    const complex& at(std::size_t t, std::size_t a) const { return samples_[t * angular_.size() + a]; }
    std::span<complex> samples() noexcept { return samples_; }
    std::span<const complex> samples() const noexcept { return samples_; }
    std::span<const complex> row(std::size_t t) const { return {samples_.data() + t * angular_.size(), angular_.size()}; }

    bool same_grid(const BoundaryTrace& other) const {
        return angular_ == other.angular_ && time_ == other.time_;
    }
    /// The first n_steps samples, i.e. the same data on the shorter horizon n_steps * dt.
    BoundaryTrace truncated(std::size_t n_steps) const;
    /// Largest |imaginary part| over all samples.
    double max_imag() const;

    BoundaryTrace& operator+=(const BoundaryTrace& other);
    BoundaryTrace& operator-=(const BoundaryTrace& other);
    BoundaryTrace& operator*=(complex s);

private:
    AngularGrid angular_;
    TimeGrid time_;
    std::vector<complex> samples_;
};

/// Plain Euclidean norm of the samples.
double l2_norm(const BoundaryTrace& trace);

/// Psi(theta, t) = angular factor of `index` times cos(mu t).
BoundaryTrace sample_psi(const ModeIndex& index, double mu, const TimeGrid& time, const AngularGrid& angular);

/// Sum over modes of X * h(1) * angular(theta) * cos(mu t). Throws IndexError for a
/// coefficient without a mode.
BoundaryTrace forward_spectral(const ModalCoefficients& coeffs, std::span<const Mode> modes, const TimeGrid& time,
                               const AngularGrid& angular);

/// As forward_spectral with an arbitrary per-mode gain in place of h(1).
BoundaryTrace modal_trace(const ModalCoefficients& coeffs, std::span<const Mode> modes, const TimeGrid& time,
                          const AngularGrid& angular, double (*gain)(const RadialMode&));

struct FdtdConfig {
    std::size_t radial_cells = 512;
    std::size_t angular_points = 64;
    double cfl = 0.45; // dt <= cfl * dr / sqrt(c_max)
};

struct FdtdResult {
    BoundaryTrace trace;
    std::vector<double> energy; // at every trace sample
    double dt = 0.0;            // internal step
    std::size_t steps = 0;
    std::size_t channels = 0;   // angular channels actually evolved

    double energy_drift() const;
};

/// Leapfrog integration of p_tt = c(r) Δp on the unit disk with p_r(1) = 0 and
/// p_t(0) = 0. Angular derivatives are taken exactly in Fourier space; the radial
/// operator is the conservative stencil of the eigensolver. Channel l is dropped
/// on rings with r < |l| dr / 2. Throws ConfigError if the step violates the
/// stability bound and DivergenceError on a non-finite sample.
FdtdResult forward_fdtd_detailed(const GridFunction& f0, const SoundSpeedProfile& profile, const FdtdConfig& config,
                                 const TimeGrid& time);

BoundaryTrace forward_fdtd(const GridFunction& f0, const SoundSpeedProfile& profile, const FdtdConfig& config,
                           const TimeGrid& time);

/// (2/A) sum_t sum_theta u conj(v) w_theta dt. Throws ShapeError on grid mismatch.
complex h_inner_product(const BoundaryTrace& u, const BoundaryTrace& v);

/// (2/A) ∫_0^A cos(a t) cos(b t) dt in closed form.
double cosine_pair_average(double a, double b, double horizon);

} // namespace patsvd
