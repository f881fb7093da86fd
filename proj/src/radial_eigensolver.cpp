#include "patsvd/radial_eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "patsvd/bessel.hpp"
#include "patsvd/error.hpp"
#include "patsvd/quadrature.hpp"

namespace patsvd {

namespace {

constexpr double kZeroEigenvalue = 1e-12;

void check_dimension(int dimension) {
    if (dimension != 2 && dimension != 3)
        throw DomainError("dimension must be 2 or 3, got " + std::to_string(dimension));
}

/// l(l+n-2); 2D depends on l^2 only so negative l is folded.
double angular_eigenvalue(int l, int dimension) {
    const double al = std::abs(l);
    return al * (al + dimension - 2.0);
}

double face_flux_coefficient(const RadialGrid& grid, std::size_t face, int dimension) {
    return std::pow(grid.face(face), dimension - 1) / grid.spacing();
}

SymTridiag scaled_pencil(const DiscreteOperator& op) {
    SymTridiag a;
    const std::size_t n = op.weight.size();
    a.diag.resize(n);
    a.off.resize(n - 1);
    for (std::size_t j = 0; j < n; ++j) a.diag[j] = op.stiffness.diag[j] / op.weight[j];
    for (std::size_t j = 0; j + 1 < n; ++j)
        a.off[j] = op.stiffness.off[j] / std::sqrt(op.weight[j] * op.weight[j + 1]);
    return a;
}

} // namespace

std::string to_string(BoundaryCondition bc) { return bc == BoundaryCondition::Neumann ? "neumann" : "dirichlet"; }

BoundaryCondition parse_boundary_condition(const std::string& s) {
    if (s == "neumann" || s == "Neumann") return BoundaryCondition::Neumann;
    if (s == "dirichlet" || s == "Dirichlet") return BoundaryCondition::Dirichlet;
    throw ConfigError("unknown boundary condition '" + s + "' (expected neumann or dirichlet)");
}

EndpointClass classify_origin(int dimension, int l) {
    check_dimension(dimension);
    if (l < 0) throw DomainError("angular index must be non-negative, got " + std::to_string(l));
    // At lambda = 0 the solutions are {1, ln r} (2D) / {1, r^{-1}} (3D) for l = 0,
    // both square-integrable against r^{n-1}/c near 0; for l >= 1 the partner
    // r^{-l-n+2} is not.
    return l == 0 ? EndpointClass::LimitCircle : EndpointClass::LimitPoint;
}

DiscreteOperator assemble_discrete_operator(const SoundSpeedProfile& profile, int l, const RadialGrid& grid,
                                            BoundaryCondition bc, int dimension) {
    check_dimension(dimension);
    const std::size_t n = grid.size();
    if (n < 8) throw ConfigError("radial grid needs at least 8 cells, got " + std::to_string(n));
    const double dr = grid.spacing();
    const double q = angular_eigenvalue(l, dimension);

    DiscreteOperator op;
    op.stiffness.diag.assign(n, 0.0);
    op.stiffness.off.assign(n - 1, 0.0);
    op.weight.resize(n);

    // interior faces 1..n-1; face 0 (r = 0) carries no flux
    for (std::size_t f = 1; f < n; ++f) {
        const double a = face_flux_coefficient(grid, f, dimension);
        op.stiffness.diag[f - 1] += a;
        op.stiffness.diag[f] += a;
        op.stiffness.off[f - 1] = -a;
    }
    if (bc == BoundaryCondition::Dirichlet) {
        // ghost h_n = -h_{n-1} puts the zero at the face r = 1
        op.stiffness.diag[n - 1] += 2.0 * face_flux_coefficient(grid, n, dimension);
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double r = grid.node(j);
        op.stiffness.diag[j] += q * std::pow(r, dimension - 3) * dr;
        op.weight[j] = std::pow(r, dimension - 1) / profile(r) * dr;
    }
    return op;
}

double stiffness_energy(int l, const RadialGrid& grid, BoundaryCondition bc,
                        int dimension, std::span<const double> h) {
    const std::size_t n = grid.size();
    const double dr = grid.spacing();
    const double q = angular_eigenvalue(l, dimension);
    double e = 0.0;
    for (std::size_t f = 1; f < n; ++f) {
        const double d = h[f] - h[f - 1];
        e += face_flux_coefficient(grid, f, dimension) * d * d;
    }
    if (q != 0.0)
        for (std::size_t j = 0; j < n; ++j) e += q * std::pow(grid.node(j), dimension - 3) * dr * h[j] * h[j];
    if (bc == BoundaryCondition::Dirichlet) e += 2.0 * face_flux_coefficient(grid, n, dimension) * h[n - 1] * h[n - 1];
    return e;
}

BoundaryData boundary_values(std::span<const double> samples, const RadialGrid& grid, BoundaryCondition bc,
                             const SoundSpeedProfile& profile, int dimension, double mu, int l) {
    check_dimension(dimension);
    if (samples.size() != grid.size()) throw ShapeError("boundary_values: samples do not match the grid");
    const double half = 0.5 * grid.spacing();
    const double last = samples.back();
    BoundaryData out;
    if (bc == BoundaryCondition::Neumann) {
        // h'(1) = 0 and the ODE at r = 1 give h''(1) = (l(l+n-2) - mu^2/c(1)) h(1)
        const double curvature = angular_eigenvalue(l, dimension) - mu * mu / profile(1.0);
        out.value = last / (1.0 + 0.5 * curvature * half * half);
        out.derivative = 0.0;
    } else {
        // flux of the ghost closure; the last cell absorbs the curvature term
        out.value = 0.0;
        out.derivative = -last / half;
    }
    return out;
}

std::vector<RadialMode> solve_radial_modes(const SoundSpeedProfile& profile, int l, std::size_t count,
                                           const RadialGrid& grid, BoundaryCondition bc, int dimension) {
    check_dimension(dimension);
    if (dimension == 3 && l < 0) throw DomainError("3D angular index must be non-negative");
    if (count > grid.size())
        throw ConfigError("cannot extract " + std::to_string(count) + " modes from " + std::to_string(grid.size()) +
                          " cells");
    const int al = std::abs(l);
    const DiscreteOperator op = assemble_discrete_operator(profile, al, grid, bc, dimension);
    const SymTridiag scaled = scaled_pencil(op);
    const std::vector<EigenPair> pairs = smallest_eigenpairs(scaled, count);

    std::vector<RadialMode> modes;
    modes.reserve(count);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        RadialMode m;
        m.dimension = dimension;
        m.l = al;
        m.k = static_cast<int>(k) + 1;
        m.bc = bc;
        m.values.resize(grid.size());
        double norm2 = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            m.values[j] = pairs[k].vector[j] / std::sqrt(op.weight[j]);
            norm2 += op.weight[j] * m.values[j] * m.values[j];
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& v : m.values) v *= inv;

        double lambda = stiffness_energy(al, grid, bc, dimension, m.values);
        if (std::abs(lambda) <= kZeroEigenvalue) lambda = 0.0;
        m.mu = std::sqrt(std::max(lambda, 0.0));

        BoundaryData b = boundary_values(m.values, grid, bc, profile, dimension, m.mu, al);
        const double sign_ref = bc == BoundaryCondition::Neumann ? b.value : b.derivative;
        if (sign_ref < 0.0) {
            for (double& v : m.values) v = -v;
            b.value = -b.value;
            b.derivative = -b.derivative;
        }
        m.boundary_value = b.value;
        m.boundary_derivative = b.derivative;
        modes.push_back(std::move(m));
    }
    for (std::size_t k = 1; k < modes.size(); ++k)
        if (!(modes[k].mu > modes[k - 1].mu))
            throw NumericalError("radial eigenfrequencies not strictly increasing at l = " + std::to_string(al) +
                                 ", k = " + std::to_string(k + 1));
    return modes;
}

std::size_t count_modes_below(const SoundSpeedProfile& profile, int l, double mu_max, const RadialGrid& grid,
                              BoundaryCondition bc, int dimension) {
    const DiscreteOperator op = assemble_discrete_operator(profile, std::abs(l), grid, bc, dimension);
    const SymTridiag scaled = scaled_pencil(op);
    // eigenvalues <= mu_max^2, with a relative guard so a boundary value counts once
    const double lambda = mu_max * mu_max * (1.0 + 1e-13) + kZeroEigenvalue;
    return sturm_count(scaled, lambda);
}

std::vector<double> bessel_reference_frequencies(double c0, int l, std::size_t count, BoundaryCondition bc,
                                                 int dimension) {
    check_dimension(dimension);
    if (!(c0 > 0.0)) throw DomainError("reference speed must be positive");
    const int al = std::abs(l);
    std::vector<double> mu;
    std::size_t wanted = count;
    if (bc == BoundaryCondition::Neumann && al == 0 && count > 0) {
        mu.push_back(0.0);
        --wanted;
    }
    std::function<double(double)> f;
    if (dimension == 2) {
        f = bc == BoundaryCondition::Neumann ? std::function<double(double)>([al](double x) { return bessel::cyl_j_prime(al, x); })
                                             : std::function<double(double)>([al](double x) { return bessel::cyl_j(al, x); });
    } else {
        f = bc == BoundaryCondition::Neumann ? std::function<double(double)>([al](double x) { return bessel::sph_j_prime(al, x); })
                                             : std::function<double(double)>([al](double x) { return bessel::sph_j(al, x); });
    }
    // no zeros of J_l, J_l', j_l or j_l' lie below l/2 other than at the origin
    const double start = 0.5 * al + 0.1;
    for (double x : bessel::roots(f, static_cast<int>(wanted), start)) mu.push_back(std::sqrt(c0) * x);
    return mu;
}

std::vector<RadialMode> bessel_reference_modes(double c0, int l, std::size_t count, BoundaryCondition bc,
                                               int dimension, const RadialGrid& grid) {
    const std::vector<double> mus = bessel_reference_frequencies(c0, l, count, bc, dimension);
    const int al = std::abs(l);
    auto radial = [al, dimension](double x) { return dimension == 2 ? bessel::cyl_j(al, x) : bessel::sph_j(al, x); };
    auto radial_prime = [al, dimension](double x) {
        return dimension == 2 ? bessel::cyl_j_prime(al, x) : bessel::sph_j_prime(al, x);
    };

    std::vector<RadialMode> modes;
    for (std::size_t k = 0; k < mus.size(); ++k) {
        const double mu = mus[k];
        const double kappa = mu / std::sqrt(c0);
        RadialMode m;
        m.dimension = dimension;
        m.l = al;
        m.k = static_cast<int>(k) + 1;
        m.mu = mu;
        m.bc = bc;
        const double norm2 = integrate(
            [&](double r) {
                const double v = kappa == 0.0 ? 1.0 : radial(kappa * r);
                return v * v * std::pow(r, dimension - 1) / c0;
            },
            0.0, 1.0, 512);
        double scale = 1.0 / std::sqrt(norm2);
        double h1 = scale * (kappa == 0.0 ? 1.0 : radial(kappa));
        double dh1 = kappa == 0.0 ? 0.0 : scale * kappa * radial_prime(kappa);
        if (bc == BoundaryCondition::Dirichlet) h1 = 0.0;
        else dh1 = 0.0;
        const double sign_ref = bc == BoundaryCondition::Neumann ? h1 : dh1;
        if (sign_ref < 0.0) {
            scale = -scale;
            h1 = -h1;
            dh1 = -dh1;
        }
        m.boundary_value = h1;
        m.boundary_derivative = dh1;
        m.values.resize(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j)
            m.values[j] = scale * (kappa == 0.0 ? 1.0 : radial(kappa * grid.node(j)));
        modes.push_back(std::move(m));
    }
    return modes;
}

std::vector<ConvergenceEstimate> convergence_order(const SoundSpeedProfile& profile, int l, BoundaryCondition bc,
                                                   int dimension, std::span<const std::size_t> grid_sizes,
                                                   std::size_t count) {
    if (grid_sizes.size() < 3) throw ConfigError("convergence_order needs at least 3 grid sizes");
    for (std::size_t i = 1; i < grid_sizes.size(); ++i)
        if (grid_sizes[i] < 2 * grid_sizes[i - 1])
            throw ConfigError("each grid size must be at least twice the previous one");

    std::vector<ConvergenceEstimate> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k].k = static_cast<int>(k) + 1;
    for (std::size_t n : grid_sizes) {
        const auto modes = solve_radial_modes(profile, l, count, RadialGrid(n), bc, dimension);
        for (std::size_t k = 0; k < count; ++k) out[k].mu.push_back(modes[k].mu);
    }
    const std::size_t s = grid_sizes.size();
    const double ratio = static_cast<double>(grid_sizes[s - 1]) / static_cast<double>(grid_sizes[s - 2]);
    const double ratio_prev = static_cast<double>(grid_sizes[s - 2]) / static_cast<double>(grid_sizes[s - 3]);
    for (auto& est : out) {
        const double d1 = est.mu[s - 2] - est.mu[s - 3];
        const double d2 = est.mu[s - 1] - est.mu[s - 2];
        const double scale = std::max(1.0, std::abs(est.mu.back()));
        if (std::abs(d1) <= 1e-13 * scale && std::abs(d2) <= 1e-13 * scale) {
            est.exact = true;
            continue;
        }
        // e_N ~ C N^{-p}: d1/d2 = (1 - ratio_prev^{-p}) / ((1 - ratio^{-p}) ratio_prev^{-p}); for equal
        // ratios this is ratio^p.
        if (std::abs(ratio - ratio_prev) < 1e-12) {
            est.order = std::log(std::abs(d1 / d2)) / std::log(ratio);
        } else {
            double lo = 0.1, hi = 10.0;
            auto g = [&](double p) {
                return (1.0 - std::pow(ratio_prev, -p)) / ((1.0 - std::pow(ratio, -p)) * std::pow(ratio_prev, -p)) -
                       std::abs(d1 / d2);
            };
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((g(mid) > 0.0) == (g(hi) > 0.0)) hi = mid;
                else lo = mid;
            }
            est.order = 0.5 * (lo + hi);
        }
    }
    return out;
}

} // namespace patsvd
