#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "patsvd/modal_basis.hpp"
#include "patsvd/wave_forward.hpp"

namespace patsvd {

/// One term of the SVD of the boundary forward operator: W phi = sigma Psi.
struct SvdTriple {
    Mode mode;
    double singular_value = 0.0; // h(1) (Neumann) or h'(1) (Dirichlet)
    double nu = 1.0;             // H-norm squared of cos(mu t): 2 for mu = 0, else 1
};

/// Throws NumericalError if a mode has a non-positive singular value.
std::vector<SvdTriple> make_triples(std::span<const Mode> modes);
std::vector<Mode> modes_of(std::span<const SvdTriple> triples);

/// <trace, sigma Psi>_H / (nu sigma^2). Works for either boundary condition.
complex recover_coefficient(const BoundaryTrace& trace, const SvdTriple& triple);

/// Largest cross-talk between distinct triples over [0, A]: max of 2/(gap A) over
/// pairs sharing an angular factor and 1/(2 A mu) over nonzero mu.
double crosstalk_bound(std::span<const SvdTriple> triples, double horizon);

struct ReconstructionReport {
    ModalCoefficients coefficients;
    double residual = 0.0; // ||forward(recovered) - trace|| / ||trace||
    std::size_t mode_count = 0;
    double horizon = 0.0;
    double crosstalk = 0.0;
    std::string method = "direct";
    double regularization = 0.0;
    std::vector<std::vector<ModeIndex>> degenerate_clusters;
};

/// Every coefficient at once: angular projection per time step, then cosine
/// correlation. Frequencies of different |l| closer than 1e-8 are solved
/// jointly and listed in the report. Throws ConfigError for an empty triple list.
ReconstructionReport recover_all(const BoundaryTrace& trace, std::span<const SvdTriple> triples);

/// recover_all followed by synthesis on (radial, angular).
std::pair<GridFunction, ReconstructionReport> reconstruct(const BoundaryTrace& trace,
                                                          std::span<const SvdTriple> triples,
                                                          const RadialGrid& radial, const AngularGrid& angular);

/// Trace of the coefficients under the triples' own gains.
BoundaryTrace triple_forward(const ModalCoefficients& coeffs, std::span<const SvdTriple> triples, const TimeGrid& time,
                             const AngularGrid& angular);

/// argmin ||A X - b||^2 + reg ||X||^2 with A(:, k) = basis[k] vectorised, solved
/// by Cholesky on the normal equations. Throws NumericalError when the system
/// is numerically rank deficient at reg = 0.
ModalCoefficients algorithm1_lsq(const BoundaryTrace& b, std::span<const BoundaryTrace> basis,
                                 std::span<const ModeIndex> labels, double regularization);

/// Basis traces sigma Psi for every triple.
std::vector<BoundaryTrace> spectral_basis(std::span<const SvdTriple> triples, const TimeGrid& time,
                                          const AngularGrid& angular);

/// Normal-derivative data of Dirichlet modes. Throws TypeError for a Neumann triple.
BoundaryTrace dirichlet_forward_trace(const ModalCoefficients& coeffs, std::span<const SvdTriple> triples,
                                      const TimeGrid& time, const AngularGrid& angular);

/// recover_coefficient restricted to Dirichlet triples (TypeError otherwise).
complex dirichlet_recover(const BoundaryTrace& trace, const SvdTriple& triple);

/// (index, singular value), largest first.
std::vector<std::pair<ModeIndex, double>> singular_spectrum(std::span<const SvdTriple> triples);

/// Adds real Gaussian noise of standard deviation level * rms(trace).
BoundaryTrace add_noise(const BoundaryTrace& trace, double level, std::uint64_t seed);

struct SweepPoint {
    double regularization = 0.0;
    double error = 0.0; // relative l2 coefficient error
};

/// algorithm1_lsq over each regularisation value, scored against `truth`.
std::vector<SweepPoint> regularization_sweep(const BoundaryTrace& b, std::span<const BoundaryTrace> basis,
                                             std::span<const ModeIndex> labels, std::span<const double> values,
                                             const ModalCoefficients& truth);

/// ||a - b||_2 / ||b||_2 over the union of indices.
double relative_coefficient_error(const ModalCoefficients& a, const ModalCoefficients& b);

} // namespace patsvd
