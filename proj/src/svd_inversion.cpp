#include "patsvd/svd_inversion.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "patsvd/error.hpp"
#include "patsvd/parallel.hpp"
#include "patsvd/simd/kernels.hpp"

namespace patsvd {

namespace {

ModeIndex angular_key(const ModeIndex& i) {
    ModeIndex key = i;
    key.k = 1;
    return key;
}

std::vector<complex> weighted_angular(const ModeIndex& key, const AngularGrid& angular) {
    std::vector<complex> out(angular.size());
    for (std::size_t a = 0; a < angular.size(); ++a)
        out[a] = angular_factor(key, angular.colatitude(a), angular.azimuth(a)) * angular.weight(a);
    return out;
}

double own_gain(const RadialMode& m) { return m.singular_value(); }

void check_trace_dimension(const BoundaryTrace& trace, std::span<const SvdTriple> triples) {
    for (const SvdTriple& t : triples)
        if (t.mode.index.dimension != trace.angular().dimension())
            throw ShapeError("triple " + t.mode.index.label() + " does not match the trace dimension");
    const int resolved = angular_bandlimit(trace.angular());
    for (const SvdTriple& t : triples)
        if (std::abs(t.mode.index.l) > resolved)
            throw ShapeError("angular grid resolves |l| <= " + std::to_string(resolved) + ", triple " +
                             t.mode.index.label() + " needs more");
}

/// Equal frequencies are structural for +-l (2D) and for m (3D); only
/// coincidences between different |l| are accidental.
bool mixes_angular_orders(std::span<const SvdTriple> triples, std::span<const std::size_t> members) {
    const int first = std::abs(triples[members.front()].mode.index.l);
    for (std::size_t i : members)
        if (std::abs(triples[i].mode.index.l) != first) return true;
    return false;
}

/// Joint solve G x = rhs with G_ij = <sigma_j Psi_j, sigma_i Psi_i>_H on the trace grid.
void solve_cluster(std::span<const SvdTriple> triples, std::span<const std::size_t> members,
                   const std::vector<complex>& rhs, const TimeGrid& time, const AngularGrid& angular,
                   std::vector<complex>& x, std::vector<std::vector<ModeIndex>>& clusters) {
    const auto m = static_cast<Eigen::Index>(members.size());
    std::vector<std::vector<complex>> ang;
    for (std::size_t i : members) ang.push_back(weighted_angular(triples[i].mode.index, angular));
    Eigen::MatrixXcd g(m, m);
    Eigen::VectorXcd b(m);
    std::vector<ModeIndex> cluster;
    for (Eigen::Index i = 0; i < m; ++i) {
        const SvdTriple& ti = triples[members[static_cast<std::size_t>(i)]];
        cluster.push_back(ti.mode.index);
        b(i) = rhs[members[static_cast<std::size_t>(i)]];
        for (Eigen::Index j = 0; j < m; ++j) {
            const SvdTriple& tj = triples[members[static_cast<std::size_t>(j)]];
            double tsum = 0.0;
            for (std::size_t t = 0; t < time.n_steps; ++t)
                tsum += std::cos(ti.mode.mu() * time.time(t)) * std::cos(tj.mode.mu() * time.time(t));
            tsum *= 2.0 / static_cast<double>(time.n_steps);
            complex asum{};
            for (std::size_t a = 0; a < angular.size(); ++a)
                asum += angular_factor(tj.mode.index, angular.colatitude(a), angular.azimuth(a)) *
                        std::conj(ang[static_cast<std::size_t>(i)][a]);
            g(i, j) = ti.singular_value * tj.singular_value * tsum * asum;
        }
    }
    const Eigen::VectorXcd sol = g.completeOrthogonalDecomposition().solve(b);
    for (Eigen::Index i = 0; i < m; ++i) x[members[static_cast<std::size_t>(i)]] = sol(i);
    clusters.push_back(std::move(cluster));
}

} // namespace

std::vector<SvdTriple> make_triples(std::span<const Mode> modes) {
    std::vector<SvdTriple> out;
    out.reserve(modes.size());
    for (const Mode& m : modes) {
        const double sigma = m.radial->singular_value();
        if (!(sigma > 0.0))
            throw NumericalError("mode " + m.index.label() + " has non-positive singular value " + std::to_string(sigma));
        out.push_back({m, sigma, m.mu() == 0.0 ? 2.0 : 1.0});
    }
    return out;
}

std::vector<Mode> modes_of(std::span<const SvdTriple> triples) {
    std::vector<Mode> out;
    out.reserve(triples.size());
    for (const SvdTriple& t : triples) out.push_back(t.mode);
    return out;
}

complex recover_coefficient(const BoundaryTrace& trace, const SvdTriple& triple) {
    const SvdTriple one[] = {triple};
    check_trace_dimension(trace, one);
    const BoundaryTrace psi = sample_psi(triple.mode.index, triple.mode.mu(), trace.time(), trace.angular());
    return h_inner_product(trace, psi) / (triple.nu * triple.singular_value);
}

double crosstalk_bound(std::span<const SvdTriple> triples, double horizon) {
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    std::map<ModeIndex, std::vector<double>> by_key;
    double bound = 0.0;
    for (const SvdTriple& t : triples) {
        by_key[angular_key(t.mode.index)].push_back(t.mode.mu());
        if (t.mode.mu() > 0.0) bound = std::max(bound, 1.0 / (2.0 * horizon * t.mode.mu()));
    }
    for (auto& [key, mus] : by_key) {
        std::sort(mus.begin(), mus.end());
        for (std::size_t i = 1; i < mus.size(); ++i) {
            const double gap = mus[i] - mus[i - 1];
            if (gap >= 1e-8) bound = std::max(bound, 2.0 / (gap * horizon));
        }
    }
    return bound;
}

BoundaryTrace triple_forward(const ModalCoefficients& coeffs, std::span<const SvdTriple> triples, const TimeGrid& time,
                             const AngularGrid& angular) {
    const std::vector<Mode> modes = modes_of(triples);
    return modal_trace(coeffs, modes, time, angular, own_gain);
}

ReconstructionReport recover_all(const BoundaryTrace& trace, std::span<const SvdTriple> triples) {
    if (triples.empty()) throw ConfigError("reconstruction needs at least one SVD triple");
    check_trace_dimension(trace, triples);
    {
        std::set<ModeIndex> seen;
        for (const SvdTriple& t : triples)
            if (!seen.insert(t.mode.index).second) throw ConfigError("duplicate triple " + t.mode.index.label());
    }
    const std::size_t nt = trace.n_steps();
    const std::size_t na = trace.angular().size();
    const TimeGrid& time = trace.time();

    std::vector<ModeIndex> keys;
    {
        std::set<ModeIndex> unique;
        for (const SvdTriple& t : triples) unique.insert(angular_key(t.mode.index));
        keys.assign(unique.begin(), unique.end());
    }
    // P_key(t) = sum_a trace(t, a) conj(Y_key(a)) w_a
    std::vector<std::vector<complex>> moments(keys.size());
    parallel_for(keys.size(), [&](std::size_t q) {
        const std::vector<complex> ang = weighted_angular(keys[q], trace.angular());
        const auto& kern = simd::kernels();
        moments[q].resize(nt);
        for (std::size_t t = 0; t < nt; ++t) moments[q][t] = kern.cdot(trace.row(t).data(), ang.data(), na);
    });

    // rhs_i = <trace, sigma_i Psi_i>_H
    const double scale = 2.0 / static_cast<double>(nt);
    std::vector<complex> rhs(triples.size());
    parallel_for(triples.size(), [&](std::size_t i) {
        const SvdTriple& tr = triples[i];
        const auto q = static_cast<std::size_t>(
            std::lower_bound(keys.begin(), keys.end(), angular_key(tr.mode.index)) - keys.begin());
        const double mu = tr.mode.mu();
        complex s{};
        for (std::size_t t = 0; t < nt; ++t) s += moments[q][t] * std::cos(mu * time.time(t));
        rhs[i] = s * scale * tr.singular_value;
    });

    ReconstructionReport report;
    report.mode_count = triples.size();
    report.horizon = time.horizon();
    report.crosstalk = crosstalk_bound(triples, time.horizon());

    // clusters of (numerically) equal frequency
    std::vector<std::size_t> order(triples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return triples[a].mode.mu() < triples[b].mode.mu(); });
    std::vector<complex> x(triples.size());
    for (std::size_t s = 0; s < order.size();) {
        std::size_t e = s + 1;
        while (e < order.size() && triples[order[e]].mode.mu() - triples[order[e - 1]].mode.mu() < 1e-8) ++e;
        if (e - s == 1 || !mixes_angular_orders(triples, std::span<const std::size_t>(order.data() + s, e - s))) {
            for (std::size_t i = s; i < e; ++i) {
                const SvdTriple& tr = triples[order[i]];
                x[order[i]] = rhs[order[i]] / (tr.nu * tr.singular_value * tr.singular_value);
            }
        } else {
            solve_cluster(triples, std::span<const std::size_t>(order.data() + s, e - s), rhs, time, trace.angular(), x,
                          report.degenerate_clusters);
        }
        s = e;
    }

    int l_max = 0, k_max = 0;
    double mu_max = 0.0;
    for (std::size_t i = 0; i < triples.size(); ++i) {
        report.coefficients.entries[triples[i].mode.index] = x[i];
        l_max = std::max(l_max, std::abs(triples[i].mode.index.l));
        k_max = std::max(k_max, triples[i].mode.index.k);
        mu_max = std::max(mu_max, triples[i].mode.mu());
    }
    report.coefficients.truncation = {mu_max, l_max, k_max};

    BoundaryTrace model = triple_forward(report.coefficients, triples, time, trace.angular());
    const double norm = l2_norm(trace);
    model -= trace;
    report.residual = norm > 0.0 ? l2_norm(model) / norm : l2_norm(model);
    return report;
}

std::pair<GridFunction, ReconstructionReport> reconstruct(const BoundaryTrace& trace,
                                                          std::span<const SvdTriple> triples,
                                                          const RadialGrid& radial, const AngularGrid& angular) {
    ReconstructionReport report = recover_all(trace, triples);
    const std::vector<Mode> modes = modes_of(triples);
    GridFunction f = synthesize(report.coefficients, modes, radial, angular);
    return {std::move(f), std::move(report)};
}

ModalCoefficients algorithm1_lsq(const BoundaryTrace& b, std::span<const BoundaryTrace> basis,
                                 std::span<const ModeIndex> labels, double regularization) {
    if (basis.empty()) throw ConfigError("least squares needs at least one basis trace");
    if (labels.size() != basis.size())
        throw ShapeError(std::to_string(labels.size()) + " labels for " + std::to_string(basis.size()) + " basis traces");
    if (!(regularization >= 0.0)) throw ConfigError("regularization must be non-negative");
    for (const BoundaryTrace& col : basis)
        if (!col.same_grid(b)) throw ShapeError("basis trace and data live on different grids");

    const auto m = static_cast<Eigen::Index>(basis.size());
    const std::size_t len = b.samples().size();
    Eigen::MatrixXcd gram(m, m);
    Eigen::VectorXcd rhs(m);
    parallel_for(basis.size(), [&](std::size_t i) {
        const auto& kern = simd::kernels();
        const complex* ai = basis[i].samples().data();
        const auto ii = static_cast<Eigen::Index>(i);
        for (std::size_t j = i; j < basis.size(); ++j) {
            const complex v = kern.cdot(basis[j].samples().data(), ai, len);
            gram(ii, static_cast<Eigen::Index>(j)) = v;
            gram(static_cast<Eigen::Index>(j), ii) = std::conj(v);
        }
        rhs(ii) = kern.cdot(b.samples().data(), ai, len);
    });
    gram.diagonal().array() += regularization;

    const Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
    if (llt.info() != Eigen::Success || (regularization == 0.0 && rcond < 1e-13))
        throw NumericalError("least-squares system is rank deficient (reciprocal condition " + std::to_string(rcond) +
                             "); pass a positive regularization");
    const Eigen::VectorXcd x = llt.solve(rhs);

    ModalCoefficients out;
    int l_max = 0, k_max = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const ModeIndex& idx = labels[static_cast<std::size_t>(i)];
        out.entries[idx] = x(i);
        l_max = std::max(l_max, std::abs(idx.l));
        k_max = std::max(k_max, idx.k);
    }
    out.truncation = {0.0, l_max, k_max};
    return out;
}

std::vector<BoundaryTrace> spectral_basis(std::span<const SvdTriple> triples, const TimeGrid& time,
                                          const AngularGrid& angular) {
    std::vector<BoundaryTrace> out;
    out.reserve(triples.size());
    for (const SvdTriple& t : triples) {
        out.push_back(sample_psi(t.mode.index, t.mode.mu(), time, angular));
        out.back() *= t.singular_value;
    }
    return out;
}

BoundaryTrace dirichlet_forward_trace(const ModalCoefficients& coeffs, std::span<const SvdTriple> triples,
                                      const TimeGrid& time, const AngularGrid& angular) {
    for (const SvdTriple& t : triples)
        if (t.mode.bc() != BoundaryCondition::Dirichlet)
            throw TypeError("mode " + t.mode.index.label() + " is not a Dirichlet mode");
    return triple_forward(coeffs, triples, time, angular);
}

complex dirichlet_recover(const BoundaryTrace& trace, const SvdTriple& triple) {
    if (triple.mode.bc() != BoundaryCondition::Dirichlet)
        throw TypeError("mode " + triple.mode.index.label() + " is not a Dirichlet mode");
    return recover_coefficient(trace, triple);
}

std::vector<std::pair<ModeIndex, double>> singular_spectrum(std::span<const SvdTriple> triples) {
    std::vector<std::pair<ModeIndex, double>> out;
    out.reserve(triples.size());
    for (const SvdTriple& t : triples) out.emplace_back(t.mode.index, t.singular_value);
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

BoundaryTrace add_noise(const BoundaryTrace& trace, double level, std::uint64_t seed) {
    if (!(level >= 0.0)) throw ConfigError("noise level must be non-negative");
    const double rms = l2_norm(trace) / std::sqrt(static_cast<double>(std::max<std::size_t>(1, trace.samples().size())));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, level * rms);
    BoundaryTrace out = trace;
    for (complex& v : out.samples()) v += normal(rng);
    return out;
}

std::vector<SweepPoint> regularization_sweep(const BoundaryTrace& b, std::span<const BoundaryTrace> basis,
                                             std::span<const ModeIndex> labels, std::span<const double> values,
                                             const ModalCoefficients& truth) {
    std::vector<SweepPoint> out;
    for (double reg : values) {
        const ModalCoefficients x = algorithm1_lsq(b, basis, labels, reg);
        out.push_back({reg, relative_coefficient_error(x, truth)});
    }
    return out;
}

double relative_coefficient_error(const ModalCoefficients& a, const ModalCoefficients& b) {
    std::set<ModeIndex> keys;
    for (const auto& [i, v] : a.entries) keys.insert(i);
    for (const auto& [i, v] : b.entries) keys.insert(i);
    double num = 0.0;
    for (const ModeIndex& i : keys) num += std::norm(a.get(i) - b.get(i));
    const double den = b.l2_norm();
    return den > 0.0 ? std::sqrt(num) / den : std::sqrt(num);
}

} // namespace patsvd
