#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "patsvd/error.hpp"
#include "patsvd/simd/kernels.hpp"
#include "patsvd/wave_forward.hpp"

using namespace patsvd;
using cd = std::complex<double>;

namespace {

struct Data {
    std::vector<double> prev, cur, lower, upper, diag, w;
    std::vector<cd> a, b;

    Data(std::size_t n, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto* v : {&prev, &cur, &lower, &upper, &diag, &w}) {
            v->resize(n);
            for (double& x : *v) x = u(rng);
        }
        a.resize(n);
        b.resize(n);
        for (cd& x : a) x = {u(rng), u(rng)};
        for (cd& x : b) x = {u(rng), u(rng)};
    }
};

const std::vector<std::size_t> sizes = [] {
    std::vector<std::size_t> s;
    for (std::size_t n = 0; n <= 37; ++n) s.push_back(n);
    for (std::size_t n : {63, 64, 65, 255, 1000, 4097}) s.push_back(n);
    return s;
}();

void check_table(const simd::KernelTable& k, double tol) {
    for (std::size_t n : sizes) {
        Data d(n, 100 + n);

        std::vector<double> out = d.prev;
        k.leapfrog(out.data(), d.cur.data(), d.lower.data(), d.upper.data(), d.diag.data(), n);
        for (std::size_t j = 0; j < n; ++j) {
            const double left = j > 0 ? d.cur[j - 1] : 0.0;
            const double right = j + 1 < n ? d.cur[j + 1] : 0.0;
            const double want = 2.0 * d.cur[j] - d.prev[j] + d.lower[j] * left + d.upper[j] * right - d.diag[j] * d.cur[j];
            CHECK(std::abs(out[j] - want) <= tol * 8.0);
        }

        cd cdot{}, cdot_real{};
        double dot = 0.0, scale_c = 0.0, scale_r = 0.0, scale_d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cdot += d.a[i] * std::conj(d.b[i]);
            cdot_real += d.a[i] * d.w[i];
            dot += d.prev[i] * d.cur[i];
            scale_c += std::abs(d.a[i]) * std::abs(d.b[i]);
            scale_r += std::abs(d.a[i]) * std::abs(d.w[i]);
            scale_d += std::abs(d.prev[i] * d.cur[i]);
        }
        CHECK(std::abs(k.cdot(d.a.data(), d.b.data(), n) - cdot) <= tol * std::max(scale_c, 1.0));
        CHECK(std::abs(k.cdot_real(d.a.data(), d.w.data(), n) - cdot_real) <= tol * std::max(scale_r, 1.0));
        CHECK(std::abs(k.dot(d.prev.data(), d.cur.data(), n) - dot) <= tol * std::max(scale_d, 1.0));
    }
}

} // namespace

TEST_CASE("scalar kernels against plain loops") {
    check_table(simd::kernels(simd::Level::Scalar), 1e-14);
}

TEST_CASE("vector kernels agree with the scalar path") {
    if (simd::detected_level() != simd::Level::Avx2) {
        MESSAGE("AVX2 not available on this CPU; vector variant not exercised");
        return;
    }
    check_table(simd::kernels(simd::Level::Avx2), 1e-13);
    const auto& s = simd::kernels(simd::Level::Scalar);
    const auto& v = simd::kernels(simd::Level::Avx2);
    for (std::size_t n : sizes) {
        Data d(n, 7 * n + 1);
        std::vector<double> x = d.prev, y = d.prev;
        s.leapfrog(x.data(), d.cur.data(), d.lower.data(), d.upper.data(), d.diag.data(), n);
        v.leapfrog(y.data(), d.cur.data(), d.lower.data(), d.upper.data(), d.diag.data(), n);
        for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(x[j] - y[j]) <= 1e-13 * std::max(1.0, std::abs(x[j])));
    }
}

TEST_CASE("level selection") {
    const simd::Level before = simd::active_level();
    simd::set_level(simd::Level::Scalar);
    CHECK(simd::active_level() == simd::Level::Scalar);
    CHECK(&simd::kernels() == &simd::kernels(simd::Level::Scalar));
    if (simd::detected_level() == simd::Level::Avx2) {
        simd::set_level(simd::Level::Avx2);
        CHECK(simd::active_level() == simd::Level::Avx2);
    } else {
        CHECK_THROWS_AS(simd::set_level(simd::Level::Avx2), ConfigError);
    }
    CHECK(simd::to_string(simd::Level::Scalar) == "scalar");
    CHECK(simd::to_string(simd::Level::Avx2) == "avx2");
    simd::set_level(before);
}

TEST_CASE("FDTD traces do not depend on the kernel level") {
    const simd::Level before = simd::active_level();
    const RadialGrid grid(96);
    const AngularGrid ang = AngularGrid::circle(12);
    GridFunction f(grid, ang);
    for (std::size_t j = 0; j < grid.size(); ++j)
        for (std::size_t a = 0; a < ang.size(); ++a) {
            const double r = grid.node(j);
            f.at(j, a) = std::exp(-r * r / 0.05) * (1.0 + 0.3 * std::cos(2.0 * ang.azimuth(a)));
        }
    const auto prof = SoundSpeedProfile::rational();
    const TimeGrid t{0.02, 500};
    simd::set_level(simd::Level::Scalar);
    const BoundaryTrace s = forward_fdtd(f, prof, {96, 12, 0.45}, t);
    simd::set_level(simd::detected_level());
    const BoundaryTrace v = forward_fdtd(f, prof, {96, 12, 0.45}, t);
    simd::set_level(before);
    BoundaryTrace diff = s;
    diff -= v;
    CHECK(l2_norm(diff) <= 1e-11 * l2_norm(s));
}
