#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "patsvd/error.hpp"
#include "patsvd/wave_forward.hpp"

#include "../support/oracles.hpp"

using namespace patsvd;

namespace {

const auto unit = SoundSpeedProfile::constant(1.0);

const Mode& find(const std::vector<Mode>& modes, int l, int k) {
    for (const Mode& m : modes)
        if (m.index.l == l && m.index.k == k) return m;
    throw std::runtime_error("missing mode");
}

double relative_distance(const BoundaryTrace& a, const BoundaryTrace& b) {
    BoundaryTrace d = a;
    d -= b;
    return l2_norm(d) / l2_norm(b);
}

GridFunction blob(const RadialGrid& radial, const AngularGrid& ang, double x0, double y0, double s) {
    GridFunction g(radial, ang);
    for (std::size_t j = 0; j < radial.size(); ++j)
        for (std::size_t a = 0; a < ang.size(); ++a) {
            const double x = radial.node(j) * std::cos(ang.azimuth(a)) - x0;
            const double y = radial.node(j) * std::sin(ang.azimuth(a)) - y0;
            g.at(j, a) = std::exp(-(x * x + y * y) / (s * s));
        }
    return g;
}

} // namespace

TEST_CASE("time grid") {
    const TimeGrid t = TimeGrid::for_horizon(200.0, 10.0);
    CHECK(t.horizon() == doctest::Approx(200.0).epsilon(1e-14));
    CHECK(t.dt * 10.0 <= std::numbers::pi / 4 + 1e-15);
    const TimeGrid coarser{200.0 / static_cast<double>(t.n_steps - 1), t.n_steps - 1};
    CHECK(coarser.dt * 10.0 > std::numbers::pi / 4);
    CHECK(t.time(0) == doctest::Approx(0.5 * t.dt));
    CHECK_THROWS_AS(TimeGrid::for_horizon(0.0, 1.0), ConfigError);
    CHECK_THROWS_AS((TimeGrid{0.2, 10}.check(10.0)), ConfigError);
    CHECK_NOTHROW((TimeGrid{0.05, 10}.check(10.0)));
}

TEST_CASE("boundary trace container") {
    const AngularGrid ang = AngularGrid::circle(4);
    BoundaryTrace t(ang, {0.1, 5});
    t.at(3, 2) = complex(1.0, -0.5);
    CHECK(t.max_imag() == 0.5);
    CHECK(l2_norm(t) == doctest::Approx(std::sqrt(1.25)));
    const BoundaryTrace head = t.truncated(4);
    CHECK(head.n_steps() == 4);
    CHECK(head.time().horizon() == doctest::Approx(0.4));
    CHECK(head.at(3, 2) == t.at(3, 2));
    CHECK_THROWS_AS(t.truncated(6), ShapeError);
    BoundaryTrace u = t;
    u *= 2.0;
    u -= t;
    CHECK(u.at(3, 2) == t.at(3, 2));
    CHECK_THROWS_AS(u += head, ShapeError);
    CHECK_THROWS_AS(BoundaryTrace(ang, {0.1, 5}, std::vector<complex>(3)), ShapeError);
}

TEST_CASE("spectral forward") {
    const RadialGrid grid(256);
    const auto modes = enumerate_modes_rect(SoundSpeedProfile::rational(), grid, BoundaryCondition::Neumann, 2, 3, 3);
    const AngularGrid ang = AngularGrid::circle(12);
    const TimeGrid t = TimeGrid::for_horizon(30.0, 20.0);

    SUBCASE("single mode") {
        const Mode& m = find(modes, -2, 3);
        ModalCoefficients x;
        x.entries[m.index] = 1.0;
        const BoundaryTrace tr = forward_spectral(x, modes, t, ang);
        for (std::size_t j = 0; j < t.n_steps; j += 7)
            for (std::size_t a = 0; a < ang.size(); ++a) {
                const complex want = m.radial->boundary_value * oracle::planar_angular(-2, ang.azimuth(a)) *
                                     std::cos(m.mu() * t.time(j));
                CHECK(std::abs(tr.at(j, a) - want) < 1e-13);
            }
    }
    SUBCASE("constant mode is time independent") {
        ModalCoefficients x;
        x.entries[find(modes, 0, 1).index] = 2.5;
        const BoundaryTrace tr = forward_spectral(x, modes, t, ang);
        for (std::size_t j = 0; j < t.n_steps; ++j)
            for (std::size_t a = 0; a < ang.size(); ++a) CHECK(tr.at(j, a) == tr.at(0, 0));
    }
    SUBCASE("zero") {
        const BoundaryTrace tr = forward_spectral(ModalCoefficients{}, modes, t, ang);
        CHECK(l2_norm(tr) == 0.0);
    }
    SUBCASE("missing mode") {
        ModalCoefficients x;
        x.entries[ModeIndex::planar(7, 1)] = 1.0;
        CHECK_THROWS_AS(forward_spectral(x, modes, t, ang), IndexError);
    }
    SUBCASE("linear") {
        ModalCoefficients x, y, z;
        for (const Mode& m : modes) {
            x.entries[m.index] = complex(m.index.k, m.index.l);
            y.entries[m.index] = complex(-1.0, 0.5 * m.index.k);
            z.entries[m.index] = 2.0 * x.get(m.index) - 3.0 * y.get(m.index);
        }
        BoundaryTrace lhs = forward_spectral(z, modes, t, ang);
        BoundaryTrace rhs = forward_spectral(x, modes, t, ang);
        rhs *= 2.0;
        BoundaryTrace ty = forward_spectral(y, modes, t, ang);
        ty *= 3.0;
        rhs -= ty;
        CHECK(relative_distance(lhs, rhs) < 1e-14);
    }
}

TEST_CASE("FDTD single mode against the spectral trace") {
    const RadialGrid grid(512);
    const AngularGrid ang = AngularGrid::circle(8);
    const auto modes = enumerate_modes_rect(unit, grid, BoundaryCondition::Neumann, 2, 0, 2);
    const Mode& m = find(modes, 0, 2);
    const TimeGrid t = TimeGrid::for_horizon(20.0, m.mu());
    const FdtdResult r = forward_fdtd_detailed(sample_mode(m, grid, ang), unit, {512, 8, 0.45}, t);
    ModalCoefficients x;
    x.entries[m.index] = 1.0;
    CHECK(relative_distance(r.trace, forward_spectral(x, modes, t, ang)) <= 0.02);
    CHECK(r.energy_drift() <= 0.005);
    // continuum energy of phi cos(mu t)
    CHECK(r.energy.front() == doctest::Approx(0.5 * m.mu() * m.mu()).epsilon(1e-3));
    CHECK(r.channels == 1);
}

TEST_CASE("FDTD of zero is zero") {
    const RadialGrid grid(64);
    const AngularGrid ang = AngularGrid::circle(16);
    const BoundaryTrace tr = forward_fdtd(GridFunction(grid, ang), unit, {64, 16, 0.45}, {0.05, 100});
    CHECK(l2_norm(tr) == 0.0);
}

TEST_CASE("FDTD agreement improves under refinement") {
    const AngularGrid ang = AngularGrid::circle(8);
    std::vector<double> err;
    for (std::size_t n : {64u, 128u, 256u, 512u}) {
        const RadialGrid grid(n);
        const auto modes = enumerate_modes_rect(SoundSpeedProfile::rational(), grid, BoundaryCondition::Neumann, 2, 1, 3);
        const Mode& m = find(modes, 1, 3);
        const TimeGrid t = TimeGrid::for_horizon(10.0, m.mu());
        const BoundaryTrace tr =
            forward_fdtd(sample_mode(m, grid, ang), SoundSpeedProfile::rational(), {n, 8, 0.45}, t);
        ModalCoefficients x;
        x.entries[m.index] = 1.0;
        err.push_back(relative_distance(tr, forward_spectral(x, modes, t, ang)));
    }
    for (std::size_t i = 1; i < err.size(); ++i) {
        CHECK(err[i] < err[i - 1]);
        CHECK(std::log2(err[i - 1] / err[i]) >= 1.5);
    }
}

TEST_CASE("FDTD is linear and stays bounded") {
    const RadialGrid grid(128);
    const AngularGrid ang = AngularGrid::circle(32);
    const auto c2 = SoundSpeedProfile::annulus(0.3, 0.6);
    const FdtdConfig fc{128, 32, 0.45};
    const TimeGrid t{0.01, 20000};
    const GridFunction f = blob(grid, ang, 0.2, 0.1, 0.15);
    GridFunction g = blob(grid, ang, -0.3, 0.0, 0.2);
    const BoundaryTrace tf = forward_fdtd(f, c2, fc, t);
    double peak0 = 0.0;
    for (const complex& v : f.samples()) peak0 = std::max(peak0, std::abs(v));
    double peak = 0.0;
    for (const complex& v : tf.samples()) peak = std::max(peak, std::abs(v));
    CHECK(peak <= 10.0 * peak0);

    const TimeGrid shorter{0.01, 2000};
    GridFunction sum = f;
    GridFunction g3 = g;
    g3 *= 3.0;
    sum += g3;
    BoundaryTrace lhs = forward_fdtd(sum, c2, fc, shorter);
    BoundaryTrace rhs = forward_fdtd(g, c2, fc, shorter);
    rhs *= 3.0;
    rhs += tf.truncated(2000);
    CHECK(relative_distance(lhs, rhs) < 1e-10);
}

TEST_CASE("FDTD guards") {
    const RadialGrid grid(64);
    const AngularGrid ang = AngularGrid::circle(16);
    const GridFunction f = blob(grid, ang, 0.0, 0.0, 0.2);
    const TimeGrid t{0.05, 10};
    CHECK_NOTHROW(forward_fdtd(f, unit, {64, 16, 0.99}, t));
    CHECK_THROWS_AS(forward_fdtd(f, unit, {64, 16, 1.0}, t), ConfigError);
    CHECK_THROWS_AS(forward_fdtd(f, unit, {64, 16, 1.5}, t), ConfigError);
    CHECK_THROWS_AS(forward_fdtd(f, unit, {128, 16, 0.45}, t), ShapeError);
    const RadialGrid g3(16);
    CHECK_THROWS_AS(forward_fdtd(GridFunction(g3, AngularGrid::sphere(2, 4)), unit, {16, 8, 0.45}, t), ConfigError);
    GridFunction bad = f;
    bad.at(10, 3) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(forward_fdtd(bad, unit, {64, 16, 0.45}, t), DivergenceError);
}

TEST_CASE("H inner product") {
    const AngularGrid ang = AngularGrid::circle(8);
    const double iota = 3.83171;
    const TimeGrid t = TimeGrid::for_horizon(200.0, iota);
    const BoundaryTrace p1 = sample_psi(ModeIndex::planar(1, 1), iota, t, ang);
    CHECK(std::abs(h_inner_product(p1, p1) - 1.0) <= 6.6e-4);
    const BoundaryTrace p0 = sample_psi(ModeIndex::planar(0, 1), iota, t, ang);
    CHECK(std::abs(h_inner_product(p0, p1)) <= 1e-14);
    const BoundaryTrace c = sample_psi(ModeIndex::planar(0, 1), 0.0, t, ang);
    CHECK(h_inner_product(c, c).real() == doctest::Approx(2.0).epsilon(1e-12));
    const BoundaryTrace other = sample_psi(ModeIndex::planar(0, 1), iota, {t.dt, t.n_steps - 1}, ang);
    CHECK_THROWS_AS(h_inner_product(p0, other), ShapeError);
}

TEST_CASE("cosine pair average") {
    for (double A : {10.0, 100.0, 1000.0}) CHECK(std::abs(cosine_pair_average(3.0, 3.0, A) - 1.0) <= 1.0 / (2.0 * A * 3.0));
    CHECK(std::abs(cosine_pair_average(3.83171, 7.01559, 200.0)) <= 3.15e-3);
    for (double A : {1.0, 50.0}) CHECK(cosine_pair_average(0.0, 0.0, A) == 2.0);
    // agrees with the quadrature definition
    const double a = 1.3, b = 2.9, A = 40.0;
    const double q = 2.0 / A * oracle::simpson([&](double s) { return std::cos(a * s) * std::cos(b * s); }, 0.0, A, 200000);
    CHECK(cosine_pair_average(a, b, A) == doctest::Approx(q).epsilon(1e-10).scale(1.0));
    CHECK(cosine_pair_average(a, a + 1e-12, A) == doctest::Approx(cosine_pair_average(a, a, A)).epsilon(1e-9));
    for (double horizon : {25.0, 100.0, 400.0})
        for (double x : {0.5, 2.0, 7.5})
            for (double y : {1.0, 3.3, 11.0}) {
                if (x == y) continue;
                const double c = std::max(1.0 / (2.0 * std::min(x, y)), 2.0 / std::abs(x - y));
                CHECK(std::abs(cosine_pair_average(x, y, horizon)) <= c / horizon);
            }
    CHECK_THROWS_AS(cosine_pair_average(1.0, 2.0, 0.0), ConfigError);
}
