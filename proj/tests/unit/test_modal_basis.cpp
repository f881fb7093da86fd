#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "patsvd/error.hpp"
#include "patsvd/modal_basis.hpp"
#include "patsvd/spherical_harmonics.hpp"

#include "../support/oracles.hpp"

using namespace patsvd;

namespace {

const auto unit = SoundSpeedProfile::constant(1.0);
const auto c1 = SoundSpeedProfile::rational();

GridFunction bump(const RadialGrid& radial, const AngularGrid& ang, double x0, double y0, double s) {
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

TEST_CASE("evaluate_mode") {
    const RadialGrid grid(256);
    const auto modes = enumerate_modes_rect(unit, grid, BoundaryCondition::Neumann, 2, 2, 2);
    const Mode& constant = modes.front();
    REQUIRE(constant.mu() == 0.0);
    for (double r : {0.001, 0.3, 0.77, 1.0})
        for (double th : {0.0, 1.0, 4.0}) CHECK(std::abs(evaluate_mode(constant, r, th) - 1.0 / std::sqrt(std::numbers::pi)) < 1e-12);

    for (const Mode& m : modes)
        if (m.index.l == 1) {
            const complex a = evaluate_mode(m, 0.6, 0.0), b = evaluate_mode(m, 0.6, std::numbers::pi);
            CHECK(std::abs(a + b) < 1e-12);
        }

    const auto ball = enumerate_modes_rect(unit, grid, BoundaryCondition::Neumann, 3, 0, 2);
    for (const Mode& m : ball) {
        const complex v = evaluate_mode(m, 0.5, 1.1, 0.4);
        CHECK(std::abs(v - radial_value(*m.radial, 0.5) / std::sqrt(4.0 * std::numbers::pi)) < 1e-12);
        CHECK(std::abs(v - evaluate_mode(m, 0.5, 2.9, 2.0)) < 1e-12);
    }
    CHECK_THROWS_AS(evaluate_mode(constant, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(evaluate_mode(constant, 1.2, 0.0), DomainError);
}

TEST_CASE("radial interpolation tracks the Bessel function") {
    const RadialGrid grid(1024);
    const auto m = solve_radial_modes(unit, 1, 2, grid, BoundaryCondition::Neumann, 2)[1];
    const double n = oracle::boundary_gain(2, 1, m.mu, true) / std::abs(oracle::cyl_j(1, m.mu));
    for (double r : {0.0003, 0.1, 0.4321, 0.9, 0.9999, 1.0}) {
        const double want = n * oracle::cyl_j(1, m.mu * r) * (oracle::cyl_j(1, m.mu) > 0 ? 1.0 : -1.0);
        CHECK(radial_value(m, r) == doctest::Approx(want).epsilon(1e-4).scale(1.0));
    }
}

TEST_CASE("weighted inner product") {
    const RadialGrid grid(512);
    const AngularGrid ang = AngularGrid::circle(16);
    GridFunction one(grid, ang);
    for (complex& v : one.samples()) v = 1.0;
    CHECK(weighted_inner_product(one, one, unit).real() == doctest::Approx(std::numbers::pi).epsilon(1e-12));

    const auto modes = enumerate_modes_rect(c1, grid, BoundaryCondition::Neumann, 2, 2, 3);
    for (const Mode& m : modes) {
        const GridFunction f = sample_mode(m, grid, ang);
        CHECK(std::abs(weighted_inner_product(f, f, c1) - 1.0) < 1e-8);
    }
    auto find = [&](int l, int k) {
        for (const Mode& m : modes)
            if (m.index.l == l && m.index.k == k) return sample_mode(m, grid, ang);
        throw std::runtime_error("missing mode");
    };
    CHECK(std::abs(weighted_inner_product(find(0, 1), find(2, 1), c1)) < 1e-10);

    GridFunction other(RadialGrid(256), ang);
    CHECK_THROWS_AS(weighted_inner_product(one, other, unit), ShapeError);
}

TEST_CASE("volume weights sum to the weighted volume") {
    const RadialGrid grid(400);
    double s2 = 0.0;
    for (double w : volume_weights(grid, AngularGrid::circle(12), unit)) s2 += w;
    CHECK(s2 == doctest::Approx(std::numbers::pi).epsilon(1e-12));
    double s3 = 0.0;
    for (double w : volume_weights(grid, AngularGrid::sphere(6, 12), unit)) s3 += w;
    CHECK(s3 == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-5));
    double sa = 0.0;
    const AngularGrid sph = AngularGrid::sphere(5, 10);
    for (double w : sph.weights()) sa += w;
    CHECK(sa == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-13));
}

TEST_CASE("project") {
    const RadialGrid grid(384);
    const auto modes = lowest_modes(c1, grid, BoundaryCondition::Neumann, 2, 60);
    const AngularGrid ang = angular_grid_for(modes);

    SUBCASE("a sampled mode projects to a unit vector") {
        for (const Mode& m : modes) {
            if (m.index.k != 2 || m.index.l != 1) continue;
            const ModalCoefficients c = project(sample_mode(m, grid, ang), modes, c1);
            for (const Mode& n : modes) CHECK(std::abs(c.get(n.index) - (n.index == m.index ? 1.0 : 0.0)) <= 1e-8);
        }
    }
    SUBCASE("zero") {
        const ModalCoefficients c = project(GridFunction(grid, ang), modes, c1);
        for (const auto& [i, v] : c.entries) CHECK(v == complex{});
    }
    SUBCASE("brute-force quadrature") {
        const GridFunction f = bump(grid, ang, 0.2, -0.1, 0.25);
        const ModalCoefficients c = project(f, modes, c1);
        for (const Mode& m : modes) {
            complex want = 0.0;
            for (std::size_t j = 0; j < grid.size(); ++j) {
                const double r = grid.node(j);
                for (std::size_t a = 0; a < ang.size(); ++a)
                    want += f.at(j, a) * std::conj(m.radial->values[j] * oracle::planar_angular(m.index.l, ang.azimuth(a))) *
                            r * (1.0 + r * r) * grid.spacing() * (2.0 * std::numbers::pi / static_cast<double>(ang.size()));
            }
            CHECK(std::abs(c.get(m.index) - want) <= 1e-10);
        }
    }
    SUBCASE("conjugate symmetry for real input") {
        const ModalCoefficients c = project(bump(grid, ang, -0.3, 0.25, 0.2), modes, c1);
        int pairs = 0;
        for (const auto& [i, v] : c.entries) {
            const auto mirror = c.entries.find(ModeIndex::planar(-i.l, i.k));
            if (mirror == c.entries.end()) continue; // the count may split a +-l pair
            CHECK(std::abs(v - std::conj(mirror->second)) <= 1e-10);
            ++pairs;
        }
        CHECK(pairs >= 55);
    }
    SUBCASE("3D projection onto spherical harmonics") {
        const RadialGrid g3(128);
        const auto ball = lowest_modes(unit, g3, BoundaryCondition::Neumann, 3, 40);
        const AngularGrid sph = angular_grid_for(ball);
        for (const Mode& m : ball) {
            const ModalCoefficients c = project(sample_mode(m, g3, sph), ball, unit);
            for (const Mode& n : ball) CHECK(std::abs(c.get(n.index) - (n.index == m.index ? 1.0 : 0.0)) <= 1e-8);
        }
    }
}

TEST_CASE("synthesize") {
    const RadialGrid grid(256);
    const auto modes = lowest_modes(c1, grid, BoundaryCondition::Neumann, 2, 200);
    const AngularGrid ang = angular_grid_for(modes);

    ModalCoefficients single;
    single.entries[modes[17].index] = 1.0;
    const GridFunction s = synthesize(single, modes, grid, ang);
    const GridFunction ref = sample_mode(modes[17], grid, ang);
    for (std::size_t i = 0; i < s.samples().size(); ++i) CHECK(s.samples()[i] == ref.samples()[i]);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> n01;
    ModalCoefficients x, y;
    for (const Mode& m : modes) {
        x.entries[m.index] = complex(n01(rng), n01(rng));
        y.entries[m.index] = complex(n01(rng), n01(rng));
    }
    const GridFunction fx = synthesize(x, modes, grid, ang);
    const ModalCoefficients back = project(fx, modes, c1);
    double worst = 0.0;
    for (const Mode& m : modes) worst = std::max(worst, std::abs(back.get(m.index) - x.get(m.index)));
    CHECK(worst <= 1e-8);

    // Parseval on the span
    const double energy = weighted_inner_product(fx, fx, c1).real();
    CHECK(energy == doctest::Approx(x.l2_norm() * x.l2_norm()).epsilon(1e-6));

    const complex a(0.5, -2.0), b(3.0, 0.25);
    ModalCoefficients comb;
    for (const Mode& m : modes) comb.entries[m.index] = a * x.get(m.index) + b * y.get(m.index);
    const GridFunction lhs = synthesize(comb, modes, grid, ang);
    const GridFunction fy = synthesize(y, modes, grid, ang);
    double lin = 0.0;
    for (std::size_t i = 0; i < lhs.samples().size(); ++i)
        lin = std::max(lin, std::abs(lhs.samples()[i] - (a * fx.samples()[i] + b * fy.samples()[i])));
    CHECK(lin <= 1e-12);

    ModalCoefficients stray;
    stray.entries[ModeIndex::planar(99, 1)] = 1.0;
    CHECK_THROWS_AS(synthesize(stray, modes, grid, ang), IndexError);
    CHECK_THROWS_AS(sample_mode(modes[0], RadialGrid(128), ang), ShapeError);
}

TEST_CASE("gram matrix") {
    const RadialGrid grid(512);
    auto deviation = [](const std::vector<std::vector<complex>>& g) {
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < g.size(); ++j) worst = std::max(worst, std::abs(g[i][j] - (i == j ? 1.0 : 0.0)));
        return worst;
    };
    const auto g = gram_matrix(lowest_modes(unit, grid, BoundaryCondition::Neumann, 2, 50), unit);
    CHECK(deviation(g) <= 1e-8);
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) CHECK(g[i][j] == std::conj(g[j][i]));
    CHECK(deviation(gram_matrix(lowest_modes(c1, RadialGrid(2048), BoundaryCondition::Neumann, 2, 100), c1)) <= 1e-6);
    CHECK(deviation(gram_matrix(lowest_modes(c1, RadialGrid(128), BoundaryCondition::Dirichlet, 3, 60), c1)) <= 1e-8);
}

TEST_CASE("enumeration and ordering") {
    const RadialGrid grid(256);
    const auto modes = enumerate_modes(unit, grid, BoundaryCondition::Neumann, 2, 8.0);
    for (std::size_t i = 1; i < modes.size(); ++i) {
        const Mode& p = modes[i - 1];
        const Mode& q = modes[i];
        const auto key = [](const Mode& m) { return std::make_tuple(m.mu(), std::abs(m.index.l), m.index.l, m.index.k); };
        CHECK(key(p) < key(q));
    }
    for (const Mode& m : modes) {
        CHECK(m.mu() <= 8.0);
        CHECK(m.radial->l == std::abs(m.index.l));
    }
    // shared radial factor between +l and -l
    const Mode* plus = nullptr;
    const Mode* minus = nullptr;
    for (const Mode& m : modes) {
        if (m.index.l == 2 && m.index.k == 1) plus = &m;
        if (m.index.l == -2 && m.index.k == 1) minus = &m;
    }
    REQUIRE(plus);
    REQUIRE(minus);
    CHECK(plus->radial.get() == minus->radial.get());

    const auto oracle_count = [&] {
        std::size_t n = 0;
        for (int l = 0; l <= 10; ++l)
            for (double mu : oracle::frequencies(2, l, true, 6))
                if (mu <= 8.0) n += l == 0 ? 1 : 2;
        return n;
    }();
    CHECK(modes.size() == oracle_count);

    const auto lowest = lowest_modes(unit, grid, BoundaryCondition::Neumann, 3, 25);
    CHECK(lowest.size() == 25);
    for (const Mode& m : lowest) CHECK(std::abs(m.index.m) <= m.index.l);

    CHECK(angular_bandlimit(AngularGrid::circle(10)) == 4);
    CHECK(angular_bandlimit(AngularGrid::sphere(3, 20)) == 2);
}
