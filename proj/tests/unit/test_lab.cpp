#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "patsvd/error.hpp"
#include "patsvd/io.hpp"
#include "patsvd/lab.hpp"

using namespace patsvd;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("patsvd_lab_" + std::to_string(std::random_device{}()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct Pgm {
    std::size_t width = 0, height = 0;
    std::vector<std::uint16_t> pixels;
    std::uint16_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
};

Pgm read_pgm(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::string magic;
    int maxval = 0;
    Pgm img;
    in >> magic >> img.width >> img.height >> maxval;
    in.get();
    REQUIRE(magic == "P5");
    REQUIRE(maxval == 65535);
    img.pixels.resize(img.width * img.height);
    for (auto& v : img.pixels) {
        const int hi = in.get(), lo = in.get();
        v = static_cast<std::uint16_t>(hi << 8 | lo);
    }
    REQUIRE(in.good());
    return img;
}

double coefficient_distance(const ModalCoefficients& a, const ModalCoefficients& b) {
    double num = 0.0, den = 0.0;
    for (const auto& [i, v] : b.entries) {
        num += std::norm(a.get(i) - v);
        den += std::norm(v);
    }
    for (const auto& [i, v] : a.entries)
        if (!b.entries.contains(i)) num += std::norm(v);
    return std::sqrt(num / den);
}

RunConfig in_span_config(const fs::path& out) {
    RunConfig c;
    c.profile = "c1";
    c.phantom.kind = PhantomKind::ModeCombination;
    c.phantom.features.clear();
    c.phantom.coefficients.entries = {{ModeIndex::planar(0, 1), 0.5},
                                      {ModeIndex::planar(0, 3), -1.0},
                                      {ModeIndex::planar(2, 1), complex(0.3, 0.4)},
                                      {ModeIndex::planar(-2, 1), complex(0.3, -0.4)},
                                      {ModeIndex::planar(1, 2), 0.7},
                                      {ModeIndex::planar(-1, 2), 0.7}};
    c.mode_count = 40;
    c.radial_cells = 256;
    c.horizon = 400.0;
    c.data = "spectral";
    c.method = "direct";
    c.output = out.string();
    return c;
}

} // namespace

TEST_CASE("make_profile") {
    const auto k = make_profile("const:1");
    CHECK(k.c_min() == 1.0);
    CHECK(k.c_max() == 1.0);
    const auto c1 = make_profile("c1");
    CHECK(c1(0.0) == 1.0);
    CHECK(c1(1.0) == 0.5);
    CHECK(c1(0.5) == doctest::Approx(0.8));
    const auto c2 = make_profile("c2:0.3:0.6");
    CHECK(c2(0.2) == 1.0);
    CHECK(c2(0.45) == 5.0);
    CHECK(c2(0.7) == 1.0);
    CHECK(c2.c_min() == 1.0);
    CHECK(c2.c_max() == 5.0);
    CHECK(make_profile("table:0/1,1/2")(0.5) == doctest::Approx(1.5));
    for (const char* bad : {"c3", "", "const", "const:x", "const:-1", "c2:0.6:0.3", "c1:1:2", "table:0-1"})
        CHECK_THROWS_AS(make_profile(bad), ConfigError);
}

TEST_CASE("make_phantom") {
    const RadialGrid grid(128);
    const AngularGrid ang = AngularGrid::circle(32);

    SUBCASE("zero amplitude") {
        PhantomSpec s;
        s.features = {{{0.2, 0.1}, 0.1, 0.05, 0.0}};
        const GridFunction g = make_phantom(s, grid, ang);
        for (complex v : g.samples()) CHECK(v == complex{});
    }
    SUBCASE("mode combination") {
        const auto modes = lowest_modes(SoundSpeedProfile::rational(), grid, BoundaryCondition::Neumann, 2, 10);
        for (const ModeIndex idx : {ModeIndex::planar(0, 1), ModeIndex::planar(1, 1)}) {
            PhantomSpec s;
            s.kind = PhantomKind::ModeCombination;
            s.coefficients.entries[idx] = 1.0;
            const GridFunction g = make_phantom(s, grid, ang, modes);
            const Mode* m = nullptr;
            for (const Mode& x : modes)
                if (x.index == idx) m = &x;
            REQUIRE(m);
            const GridFunction want = sample_mode(*m, grid, ang);
            for (std::size_t i = 0; i < g.samples().size(); ++i)
                CHECK(std::abs(g.samples()[i] - want.samples()[i]) < 1e-14);
        }
    }
    SUBCASE("gaussian mass") {
        PhantomSpec s;
        s.features = {{{0.3, 0.1}, 0.1, 0.05, 1.0}, {{-0.2, -0.25}, 0.08, 0.05, 0.6}};
        const RadialGrid fine(2048);
        const AngularGrid ring = AngularGrid::circle(256);
        const GridFunction g = make_phantom(s, fine, ring);
        GridFunction one(fine, ring);
        for (complex& v : one.samples()) v = 1.0;
        const double mass = weighted_inner_product(g, one, SoundSpeedProfile::constant(1.0)).real();
        const double want = std::numbers::pi * (0.1 * 0.1 * 1.0 + 0.08 * 0.08 * 0.6);
        CHECK(std::abs(mass - want) / want <= 1e-6);
    }
    SUBCASE("shapes") {
        PhantomSpec disk;
        disk.kind = PhantomKind::Disk;
        disk.features = {{{0.0, 0.0}, 0.5, 0.05, 2.0}};
        const GridFunction d = make_phantom(disk, grid, ang);
        CHECK(d.at(10, 3) == 2.0);
        CHECK(d.at(100, 3) == 0.0);
        PhantomSpec ring = disk;
        ring.kind = PhantomKind::Ring;
        ring.features[0].width = 0.1;
        const GridFunction r = make_phantom(ring, grid, ang);
        CHECK(r.at(10, 3) == 0.0);
        CHECK(r.at(64, 3) == 2.0);
    }
    SUBCASE("support") {
        PhantomSpec s;
        s.features = {{{0.7, 0.0}, 0.1, 0.05, 1.0}};
        CHECK_THROWS_AS(make_phantom(s, grid, ang), ConfigError);
        s.features = {{{0.5, 0.0}, 0.1, 0.05, 1.0}};
        CHECK_NOTHROW(make_phantom(s, grid, ang));
        s.kind = PhantomKind::Disk;
        s.features = {{{0.0, 0.6}, 0.4, 0.05, 1.0}};
        CHECK_THROWS_AS(make_phantom(s, grid, ang), ConfigError);
        s.features = {{{0.0, 0.6, 0.0}, 0.1, 0.05, 1.0}};
        CHECK_THROWS_AS(make_phantom(s, grid, ang), ConfigError);
    }
}

TEST_CASE("run config") {
    RunConfig c = preset_config("desk");
    c.mu_max = 30.0;
    c.l_max = 4;
    c.k_max = 6;
    c.regularization = 1e-3;
    c.bc = BoundaryCondition::Dirichlet;
    c.data = "spectral";
    c.phantom.coefficients.entries[ModeIndex::planar(1, 2)] = complex(0.25, -1.5);
    const auto j = c.to_json();
    CHECK(RunConfig::from_json(j).to_json() == j);
    CHECK(RunConfig::from_json(nlohmann::json::parse(j.dump())).to_json() == j);
    CHECK(RunConfig::from_json(nlohmann::json::object()).to_json() == RunConfig{}.to_json());

    auto bad = j;
    bad["horizn"] = 3;
    CHECK_THROWS_AS(RunConfig::from_json(bad), ConfigError);
    bad = j;
    bad["time"]["step"] = 1;
    CHECK_THROWS_AS(RunConfig::from_json(bad), ConfigError);

    CHECK_NOTHROW(preset_config("desk").validate());
    CHECK_NOTHROW(preset_config("paper-scale").validate());
    CHECK_THROWS_AS(preset_config("huge"), ConfigError);
    auto expect_invalid = [](auto edit) {
        RunConfig r = preset_config("desk");
        edit(r);
        CHECK_THROWS_AS(r.validate(), ConfigError);
    };
    expect_invalid([](RunConfig& r) { r.cfl = 1.0; });
    expect_invalid([](RunConfig& r) { r.dimension = 4; });
    expect_invalid([](RunConfig& r) { r.dimension = 3; });
    expect_invalid([](RunConfig& r) { r.bc = BoundaryCondition::Dirichlet; });
    expect_invalid([](RunConfig& r) { r.method = "svd"; });
    expect_invalid([](RunConfig& r) { r.regularization = -1.0; });
    expect_invalid([](RunConfig& r) { r.horizon = 0.0; });
    expect_invalid([](RunConfig& r) { r.profile = "c9"; });
    expect_invalid([](RunConfig& r) { r.l_max = 3; });
    expect_invalid([](RunConfig& r) { r.phantom.features[0].center = {0.9, 0.0}; });

    TempDir dir;
    io::write_json(dir.path / "c.json", j);
    CHECK(RunConfig::load(dir.path / "c.json").to_json() == j);
}

TEST_CASE("export_image") {
    TempDir dir;
    const RadialGrid grid(128);

    SUBCASE("constant field") {
        const AngularGrid ang = AngularGrid::circle(16);
        GridFunction g(grid, ang);
        for (complex& v : g.samples()) v = 3.0;
        export_image(g, dir.path / "c.pgm", 64);
        const Pgm img = read_pgm(dir.path / "c.pgm");
        CHECK(img.width == 64);
        CHECK(img.at(32, 32) == 32768);
        CHECK(img.at(40, 20) == 32768);
        CHECK(img.at(0, 0) == 0);
        CHECK(img.at(63, 63) == 0);
    }
    SUBCASE("angular order four") {
        const auto modes = enumerate_modes_rect(SoundSpeedProfile::constant(1.0), grid, BoundaryCondition::Neumann, 2, 4, 1);
        const Mode* m = nullptr;
        for (const Mode& x : modes)
            if (x.index == ModeIndex::planar(4, 1)) m = &x;
        REQUIRE(m);
        const AngularGrid ang = AngularGrid::circle(64);
        export_image(sample_mode(*m, grid, ang), dir.path / "l4.pgm", 256);
        const Pgm img = read_pgm(dir.path / "l4.pgm");
        std::uint16_t lo = 65535, hi = 0;
        for (std::size_t y = 0; y < 256; ++y)
            for (std::size_t x = 0; x < 256; ++x) {
                const double px = -1.0 + (x + 0.5) * 2.0 / 256, py = -1.0 + (y + 0.5) * 2.0 / 256;
                if (px * px + py * py >= 0.95) continue;
                lo = std::min(lo, img.at(x, y));
                hi = std::max(hi, img.at(x, y));
            }
        const double mid = 0.5 * (lo + hi);
        int changes = 0, prev = 0;
        for (int s = 0; s <= 720; ++s) {
            const double th = 2.0 * std::numbers::pi * s / 720;
            const auto x = static_cast<std::size_t>((0.8 * std::cos(th) + 1.0) / 2.0 * 256);
            const auto y = static_cast<std::size_t>((0.8 * std::sin(th) + 1.0) / 2.0 * 256);
            const int sign = img.at(x, y) > mid ? 1 : -1;
            if (prev != 0 && sign != prev) ++changes;
            prev = sign;
        }
        CHECK(changes == 8);
    }
    SUBCASE("raster round trip") {
        PhantomSpec s;
        s.features = {{{0.2, -0.1}, 0.25, 0.05, 1.0}};
        const AngularGrid ang = AngularGrid::circle(128);
        const GridFunction g = make_phantom(s, grid, ang);
        const std::vector<double> raster = rasterize(g, 256);
        const GridFunction back = polar_from_raster(raster, 256, grid, ang);
        CHECK(relative_l2_error(back, g) <= 0.02);
    }
    SUBCASE("errors") {
        GridFunction g(grid, AngularGrid::circle(8));
        CHECK_THROWS_AS(export_image(g, dir.path / "no" / "dir" / "x.pgm"), IoError);
        CHECK_THROWS_AS(export_image(GridFunction(grid, AngularGrid::sphere(2, 4)), dir.path / "s.pgm"), ShapeError);
    }
}

TEST_CASE("pipeline") {
    TempDir dir;

    SUBCASE("spectral data, direct inversion, in-span phantom") {
        const RunConfig c = in_span_config(dir.path / "direct");
        const PipelineResult r = run_pipeline(c);
        CHECK(r.relative_error <= 0.01);
        CHECK(r.manifest.at("metrics").at("relative_error_weighted") == r.relative_error);
        CHECK(r.manifest.at("metrics").at("crosstalk_bound").get<double>() > 0.0);
        const auto on_disk = io::read_json(dir.path / "direct" / "manifest.json");
        CHECK(on_disk == r.manifest);
        for (const auto& [name, entry] : on_disk.at("artifacts").items()) {
            const fs::path p = dir.path / "direct" / entry.at("path").get<std::string>();
            REQUIRE(fs::exists(p));
            CHECK(io::sha256_file(p) == entry.at("sha256").get<std::string>());
        }
        for (const char* name : {"config.json", "modes.bin", "phantom.grid", "reconstruction.grid", "error.grid",
                                 "trace.trace", "report.json", "phantom.pgm", "reconstruction.pgm"})
            CHECK(on_disk.at("artifacts").contains(name));
        CHECK(RunConfig::load(dir.path / "direct" / "config.json").to_json() == c.to_json());
    }
    SUBCASE("least squares equals direct") {
        RunConfig c = in_span_config(dir.path / "lsq");
        const PipelineResult direct = run_pipeline(c);
        c.method = "lsq";
        const PipelineResult lsq = run_pipeline(c);
        const double d = coefficient_distance(lsq.report.coefficients, direct.report.coefficients);
        MESSAGE("lsq vs direct relative distance " << d);
        CHECK(d <= 1e-6);
    }
    SUBCASE("FDTD data under c2") {
        RunConfig c = preset_config("desk");
        c.profile = "c2";
        c.radial_cells = 128;
        c.mode_count = 20;
        c.horizon = 20.0;
        c.output = (dir.path / "fdtd").string();
        const PipelineResult r = run_pipeline(c);
        CHECK(fs::exists(dir.path / "fdtd" / "manifest.json"));
        CHECK(std::isfinite(r.report.residual));
        CHECK(std::isfinite(r.relative_error));
        CHECK(r.manifest.at("metrics").at("fdtd_energy_drift").get<double>() < 5e-3);
    }
    SUBCASE("determinism and linearity") {
        RunConfig c = preset_config("desk");
        c.radial_cells = 128;
        c.mode_count = 30;
        c.horizon = 40.0;
        c.output = (dir.path / "det").string();
        auto a = run_pipeline(c).manifest;
        const PipelineResult first = run_pipeline(c);
        auto b = first.manifest;
        a.erase("run");
        b.erase("run");
        CHECK(a.dump() == b.dump());

        for (PhantomFeature& f : c.phantom.features) f.amplitude *= 2.0;
        const PipelineResult doubled = run_pipeline(c);
        double worst = 0.0, scale = 0.0;
        for (const auto& [i, v] : first.report.coefficients.entries) {
            worst = std::max(worst, std::abs(doubled.report.coefficients.get(i) - 2.0 * v));
            scale = std::max(scale, std::abs(v));
        }
        CHECK(worst <= 1e-10 * scale);
    }
    SUBCASE("stage labels") {
        RunConfig c = in_span_config(dir.path / "err");
        c.profile = "c9";
        try {
            run_pipeline(c);
            FAIL("expected a stage error");
        } catch (const StageError& e) {
            CHECK(e.stage() == "config");
            CHECK(std::string(e.kind()) == "config");
        }
        c = in_span_config(dir.path / "err");
        c.angular_points = 4;
        try {
            run_pipeline(c);
            FAIL("expected a stage error");
        } catch (const StageError& e) {
            CHECK(e.stage() == "guards");
            CHECK(std::string(e.kind()) == "config");
        }
        c = in_span_config(dir.path / "err");
        c.phantom.coefficients.entries[ModeIndex::planar(30, 1)] = 1.0;
        try {
            run_pipeline(c);
            FAIL("expected a stage error");
        } catch (const StageError& e) {
            CHECK(e.stage() == "phantom");
        }
    }
}

TEST_CASE("validation suites") {
    const auto names = validation_suites();
    CHECK(names.size() == 6);
    const ValidationReport classify = validate_suite("classify");
    CHECK(classify.suite == "classify");
    CHECK(!classify.checks.empty());
    CHECK(classify.passed());
    const ValidationReport prop1 = validate_suite("prop1");
    CHECK(prop1.passed());
    for (const ValidationCheck& c : prop1.checks) CHECK(c.measured <= c.tolerance);
    CHECK_THROWS_AS(validate_suite("everything"), ConfigError);
}
