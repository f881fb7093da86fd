#include "patsvd/modal_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "patsvd/error.hpp"
#include "patsvd/parallel.hpp"
#include "patsvd/quadrature.hpp"
#include "patsvd/simd/kernels.hpp"
#include "patsvd/spherical_harmonics.hpp"

namespace patsvd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kInvSqrtTwoPi = 1.0 / std::sqrt(kTwoPi);

/// Modes sharing one angular factor: (l) in 2D, (l, m) in 3D.
struct AngularKey {
    int l = 0;
    int m = 0;
    auto operator<=>(const AngularKey&) const = default;
};

AngularKey angular_key(const ModeIndex& i) { return {i.l, i.dimension == 3 ? i.m : 0}; }

std::vector<complex> angular_samples(const AngularKey& key, int dimension, const AngularGrid& angular) {
    std::vector<complex> out(angular.size());
    if (dimension == 2) {
        for (std::size_t a = 0; a < angular.size(); ++a) {
            const double t = key.l * angular.azimuth(a);
            out[a] = complex(std::cos(t), std::sin(t)) * kInvSqrtTwoPi;
        }
        return out;
    }
    const int am = std::abs(key.m);
    const std::size_t n_azim = angular.n_azim();
    const double sign = (key.m < 0 && am % 2 == 1) ? -1.0 : 1.0;
    for (std::size_t i = 0; i < angular.n_colat(); ++i) {
        const double p = normalized_legendre_column(key.l, am, std::cos(angular.colatitudes()[i])).back();
        for (std::size_t j = 0; j < n_azim; ++j) {
            const double t = key.m * angular.azimuth(i * n_azim + j);
            out[i * n_azim + j] = sign * p * complex(std::cos(t), std::sin(t));
        }
    }
    return out;
}

void check_modes_on_grid(std::span<const Mode> modes, const RadialGrid& radial, int dimension) {
    for (const Mode& m : modes) {
        if (m.radial->n_cells() != radial.size())
            throw ShapeError("mode " + m.index.label() + " lives on " + std::to_string(m.radial->n_cells()) +
                             " cells, grid has " + std::to_string(radial.size()));
        if (m.index.dimension != dimension) throw ShapeError("mode " + m.index.label() + " has the wrong dimension");
    }
}

std::vector<double> radial_weights(const RadialGrid& radial, int dimension, const SoundSpeedProfile& profile) {
    std::vector<double> w(radial.size());
    for (std::size_t j = 0; j < radial.size(); ++j) {
        const double r = radial.node(j);
        w[j] = std::pow(r, dimension - 1) * radial.spacing() / profile(r);
    }
    return w;
}

bool mode_order(const Mode& a, const Mode& b) {
    if (a.mu() != b.mu()) return a.mu() < b.mu();
    if (std::abs(a.index.l) != std::abs(b.index.l)) return std::abs(a.index.l) < std::abs(b.index.l);
    if (a.index.l != b.index.l) return a.index.l < b.index.l;
    if (a.index.m != b.index.m) return a.index.m < b.index.m;
    return a.index.k < b.index.k;
}

void append_modes(std::vector<Mode>& out, std::vector<RadialMode> radial, int l, int dimension) {
    for (RadialMode& rm : radial) {
        auto shared = std::make_shared<const RadialMode>(std::move(rm));
        if (dimension == 2) {
            out.push_back({ModeIndex::planar(l, shared->k), shared});
            if (l != 0) out.push_back({ModeIndex::planar(-l, shared->k), shared});
        } else {
            for (int m = -l; m <= l; ++m) out.push_back({ModeIndex::spatial(l, m, shared->k), shared});
        }
    }
}

std::vector<Mode> solve_per_l(const SoundSpeedProfile& profile, const RadialGrid& grid, BoundaryCondition bc,
                              int dimension, const std::vector<std::size_t>& counts) {
    std::vector<std::vector<RadialMode>> per_l(counts.size());
    parallel_for(counts.size(), [&](std::size_t l) {
        if (counts[l] > 0) per_l[l] = solve_radial_modes(profile, static_cast<int>(l), counts[l], grid, bc, dimension);
    });
    std::vector<Mode> modes;
    for (std::size_t l = 0; l < per_l.size(); ++l) append_modes(modes, std::move(per_l[l]), static_cast<int>(l), dimension);
    std::sort(modes.begin(), modes.end(), mode_order);
    return modes;
}

std::vector<std::size_t> counts_below(const SoundSpeedProfile& profile, const RadialGrid& grid, BoundaryCondition bc,
                                      int dimension, double mu_max) {
    std::vector<std::size_t> counts;
    for (int l = 0;; ++l) {
        const std::size_t c = count_modes_below(profile, l, mu_max, grid, bc, dimension);
        if (c == 0) break;
        counts.push_back(c);
    }
    return counts;
}

} // namespace

ModeIndex ModeIndex::spatial(int l, int m, int k) {
    if (l < 0 || std::abs(m) > l)
        throw DomainError("3D mode index needs l >= 0 and |m| <= l, got l = " + std::to_string(l) + ", m = " +
                          std::to_string(m));
    return {3, l, k, m};
}

std::string ModeIndex::label() const {
    std::string s = "(k=" + std::to_string(k) + ",l=" + std::to_string(l);
    if (dimension == 3) s += ",m=" + std::to_string(m);
    return s + ")";
}

AngularGrid AngularGrid::circle(std::size_t n_theta) {
    if (n_theta == 0) throw ConfigError("angular grid needs at least one point");
    AngularGrid g;
    g.dimension_ = 2;
    g.n_theta_ = n_theta;
    g.weights_.assign(n_theta, kTwoPi / static_cast<double>(n_theta));
    return g;
}

AngularGrid AngularGrid::sphere(std::size_t n_colat, std::size_t n_azim) {
    if (n_colat == 0 || n_azim == 0) throw ConfigError("spherical grid needs at least one point per direction");
    AngularGrid g;
    g.dimension_ = 3;
    g.n_theta_ = n_azim;
    const GaussLegendre rule = gauss_legendre(n_colat);
    g.colat_.resize(n_colat);
    g.weights_.resize(n_colat * n_azim);
    for (std::size_t i = 0; i < n_colat; ++i) {
        g.colat_[i] = std::acos(rule.nodes[i]);
        for (std::size_t j = 0; j < n_azim; ++j)
            g.weights_[i * n_azim + j] = rule.weights[i] * kTwoPi / static_cast<double>(n_azim);
    }
    return g;
}

double AngularGrid::azimuth(std::size_t a) const noexcept {
    return kTwoPi * static_cast<double>(a % n_theta_) / static_cast<double>(n_theta_);
}

double AngularGrid::colatitude(std::size_t a) const noexcept {
    return dimension_ == 3 ? colat_[a / n_theta_] : 0.0;
}

int angular_bandlimit(const AngularGrid& grid) {
    const int azim = (static_cast<int>(grid.n_azim()) - 2) / 2;
    if (grid.dimension() == 2) return azim;
    return std::min(azim, static_cast<int>(grid.n_colat()) - 1);
}

GridFunction::GridFunction(RadialGrid radial, AngularGrid angular)
    : radial_(radial), angular_(std::move(angular)), samples_(radial_.size() * angular_.size()) {}

GridFunction::GridFunction(RadialGrid radial, AngularGrid angular, std::vector<complex> samples)
    : radial_(radial), angular_(std::move(angular)), samples_(std::move(samples)) {
    if (samples_.size() != radial_.size() * angular_.size())
        throw ShapeError("grid function has " + std::to_string(samples_.size()) + " samples, grid needs " +
                         std::to_string(radial_.size() * angular_.size()));
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    if (!same_grid(other)) throw ShapeError("grid functions live on different grids");
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += other.samples_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    if (!same_grid(other)) throw ShapeError("grid functions live on different grids");
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= other.samples_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(complex s) {
    for (complex& v : samples_) v *= s;
    return *this;
}

double ModalCoefficients::l2_norm() const {
    double s = 0.0;
    for (const auto& [i, v] : entries) s += std::norm(v);
    return std::sqrt(s);
}

double ModalCoefficients::l1_norm() const {
    double s = 0.0;
    for (const auto& [i, v] : entries) s += std::abs(v);
    return s;
}

std::vector<double> volume_weights(const RadialGrid& radial, const AngularGrid& angular,
                                   const SoundSpeedProfile& profile) {
    const std::vector<double> wr = radial_weights(radial, angular.dimension(), profile);
    std::vector<double> w(radial.size() * angular.size());
    for (std::size_t j = 0; j < radial.size(); ++j)
        for (std::size_t a = 0; a < angular.size(); ++a) w[j * angular.size() + a] = wr[j] * angular.weight(a);
    return w;
}

double radial_value(const RadialMode& mode, double r) {
    if (!(r > 0.0 && r <= 1.0)) throw DomainError("mode evaluated outside (0, 1]");
    const std::size_t n = mode.n_cells();
    const RadialGrid grid(n);
    const double first = grid.node(0);
    const double last = grid.node(n - 1);
    if (r <= first) return mode.l == 0 ? mode.values[0] : mode.values[0] * (r / first);
    if (r >= last) {
        const double t = (r - last) / (1.0 - last);
        return (1.0 - t) * mode.values[n - 1] + t * mode.boundary_value;
    }
    const double s = r * static_cast<double>(n) - 0.5;
    const auto j = std::min(static_cast<std::size_t>(s), n - 2);
    const double t = s - static_cast<double>(j);
    return (1.0 - t) * mode.values[j] + t * mode.values[j + 1];
}

complex angular_factor(const ModeIndex& index, double colatitude, double azimuth) {
    if (index.dimension == 2) {
        const double t = index.l * azimuth;
        return complex(std::cos(t), std::sin(t)) * kInvSqrtTwoPi;
    }
    return spherical_harmonic(index.l, index.m, colatitude, azimuth);
}

complex evaluate_mode(const Mode& mode, double r, double azimuth, double colatitude) {
    return radial_value(*mode.radial, r) * angular_factor(mode.index, colatitude, azimuth);
}

GridFunction sample_mode(const Mode& mode, const RadialGrid& radial, const AngularGrid& angular) {
    const Mode one[] = {mode};
    check_modes_on_grid(one, radial, angular.dimension());
    GridFunction g(radial, angular);
    const std::vector<complex> ang = angular_samples(angular_key(mode.index), angular.dimension(), angular);
    for (std::size_t j = 0; j < radial.size(); ++j)
        for (std::size_t a = 0; a < angular.size(); ++a) g.at(j, a) = mode.radial->values[j] * ang[a];
    return g;
}

complex weighted_inner_product(const GridFunction& f, const GridFunction& g, const SoundSpeedProfile& profile) {
    if (!f.same_grid(g)) throw ShapeError("inner product of grid functions on different grids");
    const std::vector<double> wr = radial_weights(f.radial(), f.dimension(), profile);
    const auto& kern = simd::kernels();
    const std::span<const double> wa = f.angular().weights();
    const std::size_t na = f.angular().size();
    std::vector<complex> prod(na);
    complex total{};
    for (std::size_t j = 0; j < f.radial().size(); ++j) {
        const auto fr = f.ring(j);
        const auto gr = g.ring(j);
        for (std::size_t a = 0; a < na; ++a) prod[a] = fr[a] * std::conj(gr[a]);
        total += wr[j] * kern.cdot_real(prod.data(), wa.data(), na);
    }
    return total;
}

ModalCoefficients project(const GridFunction& f, std::span<const Mode> modes, const SoundSpeedProfile& profile) {
    check_modes_on_grid(modes, f.radial(), f.dimension());
    const std::vector<double> wr = radial_weights(f.radial(), f.dimension(), profile);
    const std::size_t n = f.radial().size();
    const std::size_t na = f.angular().size();

    std::vector<AngularKey> keys;
    {
        std::set<AngularKey> unique;
        for (const Mode& m : modes) unique.insert(angular_key(m.index));
        keys.assign(unique.begin(), unique.end());
    }
    // ring-wise angular moments F_key(r_j) = Σ_a f(r_j, a) conj(ang(a)) w_a
    std::vector<std::vector<complex>> moments(keys.size());
    parallel_for(keys.size(), [&](std::size_t q) {
        std::vector<complex> ang = angular_samples(keys[q], f.dimension(), f.angular());
        for (std::size_t a = 0; a < na; ++a) ang[a] *= f.angular().weight(a);
        const auto& kern = simd::kernels();
        std::vector<complex>& mom = moments[q];
        mom.resize(n);
        for (std::size_t j = 0; j < n; ++j) mom[j] = kern.cdot(f.ring(j).data(), ang.data(), na);
    });

    ModalCoefficients out;
    int l_max = 0;
    int k_max = 0;
    double mu_max = 0.0;
    for (const Mode& m : modes) {
        const auto q = static_cast<std::size_t>(
            std::lower_bound(keys.begin(), keys.end(), angular_key(m.index)) - keys.begin());
        const std::vector<complex>& mom = moments[q];
        complex c{};
        for (std::size_t j = 0; j < n; ++j) c += wr[j] * m.radial->values[j] * mom[j];
        out.entries[m.index] = c;
        l_max = std::max(l_max, std::abs(m.index.l));
        k_max = std::max(k_max, m.index.k);
        mu_max = std::max(mu_max, m.mu());
    }
    out.truncation = {mu_max, l_max, k_max};
    return out;
}

GridFunction synthesize(const ModalCoefficients& coeffs, std::span<const Mode> modes, const RadialGrid& radial,
                        const AngularGrid& angular) {
    check_modes_on_grid(modes, radial, angular.dimension());
    std::map<ModeIndex, const Mode*> lookup;
    for (const Mode& m : modes) lookup[m.index] = &m;

    const std::size_t n = radial.size();
    std::map<AngularKey, std::vector<complex>> profiles;
    for (const auto& [index, value] : coeffs.entries) {
        auto it = lookup.find(index);
        if (it == lookup.end()) throw IndexError("no mode for coefficient " + index.label());
        if (value == complex{}) continue;
        auto& prof = profiles[angular_key(index)];
        if (prof.empty()) prof.assign(n, complex{});
        const std::vector<double>& h = it->second->radial->values;
        for (std::size_t j = 0; j < n; ++j) prof[j] += value * h[j];
    }

    GridFunction g(radial, angular);
    for (const auto& [key, prof] : profiles) {
        const std::vector<complex> ang = angular_samples(key, angular.dimension(), angular);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t a = 0; a < angular.size(); ++a) g.at(j, a) += prof[j] * ang[a];
    }
    return g;
}

std::vector<Mode> enumerate_modes(const SoundSpeedProfile& profile, const RadialGrid& grid, BoundaryCondition bc,
                                  int dimension, double mu_max) {
    if (!(mu_max >= 0.0)) throw ConfigError("mu_max must be non-negative");
    return solve_per_l(profile, grid, bc, dimension, counts_below(profile, grid, bc, dimension, mu_max));
}

std::vector<Mode> enumerate_modes_rect(const SoundSpeedProfile& profile, const RadialGrid& grid, BoundaryCondition bc,
                                       int dimension, int l_max, int k_max) {
    if (l_max < 0 || k_max < 1) throw ConfigError("rectangular truncation needs l_max >= 0 and k_max >= 1");
    return solve_per_l(profile, grid, bc, dimension,
                       std::vector<std::size_t>(static_cast<std::size_t>(l_max) + 1, static_cast<std::size_t>(k_max)));
}

std::vector<Mode> lowest_modes(const SoundSpeedProfile& profile, const RadialGrid& grid, BoundaryCondition bc,
                               int dimension, std::size_t count) {
    if (count == 0) return {};
    auto total = [&](double mu) {
        std::size_t t = 0;
        const auto counts = counts_below(profile, grid, bc, dimension, mu);
        for (std::size_t l = 0; l < counts.size(); ++l)
            t += counts[l] * (l == 0 ? 1 : (dimension == 2 ? 2 : 2 * l + 1));
        return t;
    };
    double mu = 2.0;
    while (total(mu) < count) {
        mu *= 1.25;
        if (mu > 1e6) throw ConfigError("cannot find " + std::to_string(count) + " modes on this grid");
    }
    std::vector<Mode> modes = enumerate_modes(profile, grid, bc, dimension, mu);
    modes.resize(count);
    return modes;
}

int max_angular_index(std::span<const Mode> modes) {
    int l = 0;
    for (const Mode& m : modes) l = std::max(l, std::abs(m.index.l));
    return l;
}

AngularGrid angular_grid_for(std::span<const Mode> modes) {
    if (modes.empty()) throw ConfigError("empty mode list");
    const auto l = static_cast<std::size_t>(max_angular_index(modes));
    if (modes.front().index.dimension == 2) return AngularGrid::circle(2 * l + 2);
    return AngularGrid::sphere(l + 1, 2 * l + 2);
}

std::vector<std::vector<complex>> gram_matrix(std::span<const Mode> modes, const SoundSpeedProfile& profile) {
    const AngularGrid ang = angular_grid_for(modes);
    const RadialGrid radial(modes.front().radial->n_cells());
    std::vector<std::vector<complex>> g(modes.size(), std::vector<complex>(modes.size()));
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const ModalCoefficients row = project(sample_mode(modes[i], radial, ang), modes.subspan(i), profile);
        for (std::size_t j = i; j < modes.size(); ++j) {
            // project gives <phi_i, phi_j>
            g[i][j] = row.get(modes[j].index);
            g[j][i] = std::conj(g[i][j]);
        }
        g[i][i] = g[i][i].real();
    }
    return g;
}

} // namespace patsvd
