#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "patsvd/error.hpp"
#include "patsvd/io.hpp"
#include "patsvd/lab.hpp"
#include "patsvd/simd/kernels.hpp"

using namespace patsvd;

namespace {

struct ModeOptions {
    std::string profile = "c1";
    std::string bc = "neumann";
    int dimension = 2;
    std::size_t cells = 512;
    std::size_t count = 50;
    std::optional<double> mu_max;

    void attach(CLI::App* app) {
        app->add_option("--profile", profile, "sound-speed preset (c1, c2[:r1:r2], const:<v>, table:r/v,...)");
        app->add_option("--bc", bc, "boundary condition")->check(CLI::IsMember({"neumann", "dirichlet"}));
        app->add_option("--dim", dimension, "spatial dimension")->check(CLI::IsMember({2, 3}));
        app->add_option("--cells", cells, "radial cells");
        app->add_option("--modes", count, "number of lowest modes");
        app->add_option("--mu-max", mu_max, "keep every mode with mu <= mu_max instead");
    }

    std::vector<Mode> solve() const {
        const SoundSpeedProfile p = make_profile(profile);
        const RadialGrid grid(cells);
        const BoundaryCondition b = parse_boundary_condition(bc);
        if (mu_max) return enumerate_modes(p, grid, b, dimension, *mu_max);
        return lowest_modes(p, grid, b, dimension, count);
    }
};

int cmd_modes(const ModeOptions& opt, const std::string& out) {
    const auto modes = opt.solve();
    std::printf("%-18s %14s %14s %14s\n", "mode", "mu", "h(1)", "h'(1)");
    std::vector<RadialMode> unique;
    const RadialMode* last = nullptr;
    for (const Mode& m : modes) {
        std::printf("%-18s %14.8f %14.8f %14.8f\n", m.index.label().c_str(), m.mu(), m.radial->boundary_value,
                    m.radial->boundary_derivative);
        if (m.radial.get() != last) {
            bool seen = false;
            for (const RadialMode& u : unique) seen = seen || (u.l == m.radial->l && u.k == m.radial->k);
            if (!seen) unique.push_back(*m.radial);
            last = m.radial.get();
        }
    }
    if (!out.empty()) {
        io::write_modes(out, unique);
        std::printf("wrote %zu radial modes to %s\n", unique.size(), out.c_str());
    }
    return 0;
}

int cmd_gram(const ModeOptions& opt) {
    const auto modes = opt.solve();
    const auto g = gram_matrix(modes, make_profile(opt.profile));
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) worst = std::max(worst, std::abs(g[i][j] - (i == j ? 1.0 : 0.0)));
    std::printf("modes %zu  max |G - I| = %.3e\n", modes.size(), worst);
    return 0;
}

RunConfig base_config(const std::string& path, const std::string& preset) {
    if (!path.empty()) return RunConfig::load(path);
    return preset_config(preset);
}

int cmd_pipeline(RunConfig cfg) {
    const PipelineResult r = run_pipeline(cfg);
    std::printf("modes %zu  horizon %.3g  crosstalk bound %.3e\n", r.report.mode_count, r.report.horizon,
                r.report.crosstalk);
    std::printf("relative error  L2(1/c) %.4e  L2 %.4e  residual %.4e\n", r.relative_error, r.relative_error_l2,
                r.report.residual);
    std::printf("manifest %s/manifest.json\n", cfg.output.c_str());
    return 0;
}

int cmd_forward(RunConfig cfg, const std::string& out) {
    cfg.validate();
    const SoundSpeedProfile p = make_profile(cfg.profile);
    const RadialGrid radial(cfg.radial_cells);
    const auto modes = lowest_modes(p, radial, cfg.bc, cfg.dimension, cfg.mode_count);
    double mu_max = 0.0;
    for (const Mode& m : modes) mu_max = std::max(mu_max, m.mu());
    const std::size_t need = 2 * static_cast<std::size_t>(max_angular_index(modes)) + 2;
    const std::size_t na = std::max(cfg.angular_points, need);
    const AngularGrid ang = cfg.dimension == 2 ? AngularGrid::circle(na)
                                               : AngularGrid::sphere(std::max(cfg.colatitude_points, need / 2), na);
    const TimeGrid t = cfg.dt > 0.0 ? TimeGrid{cfg.dt, static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt))}
                                    : TimeGrid::for_horizon(cfg.horizon, mu_max);
    const GridFunction f = make_phantom(cfg.phantom, radial, ang, modes);
    BoundaryTrace trace = cfg.data == "fdtd"
                              ? forward_fdtd(f, p, {cfg.radial_cells, na, cfg.cfl}, t)
                              : triple_forward(project(f, modes, p), make_triples(modes), t, ang);
    if (out.size() > 4 && out.substr(out.size() - 4) == ".csv") io::write_trace_csv(out, trace);
    else io::write_trace(out, trace);
    std::printf("trace %zu x %zu (dt %.6g) -> %s\n", trace.n_steps(), ang.size(), t.dt, out.c_str());
    return 0;
}

int cmd_reconstruct(const ModeOptions& opt, const std::string& trace_path, const std::string& method, double reg,
                    const std::string& out) {
    const BoundaryTrace trace = io::read_trace(trace_path);
    const auto modes = opt.solve();
    const int l = max_angular_index(modes);
    if (l > angular_bandlimit(trace.angular()))
        throw ConfigError("trace has " + std::to_string(trace.angular().size()) + " angles, too few for |l| = " +
                          std::to_string(l));
    const auto triples = make_triples(modes);
    ReconstructionReport report;
    if (method == "lsq") {
        const auto basis = spectral_basis(triples, trace.time(), trace.angular());
        std::vector<ModeIndex> labels;
        for (const Mode& m : modes) labels.push_back(m.index);
        report.coefficients = algorithm1_lsq(trace, basis, labels, reg);
        report.method = "lsq";
        report.regularization = reg;
        report.mode_count = modes.size();
        report.horizon = trace.time().horizon();
        report.crosstalk = crosstalk_bound(triples, report.horizon);
        BoundaryTrace model = triple_forward(report.coefficients, triples, trace.time(), trace.angular());
        model -= trace;
        report.residual = l2_norm(model) / std::max(l2_norm(trace), 1e-300);
    } else {
        report = recover_all(trace, triples);
    }
    const GridFunction g = synthesize(report.coefficients, modes, RadialGrid(opt.cells), trace.angular());
    io::fs::create_directories(out);
    io::write_json(io::fs::path(out) / "report.json", io::to_json(report));
    io::write_grid(io::fs::path(out) / "reconstruction.grid", g);
    export_image(g, io::fs::path(out) / "reconstruction.pgm");
    std::printf("modes %zu  residual %.4e  crosstalk bound %.3e -> %s\n", modes.size(), report.residual,
                report.crosstalk, out.c_str());
    return 0;
}

int cmd_validate(const std::string& suite) {
    std::vector<std::string> suites = suite == "all" ? validation_suites() : std::vector<std::string>{suite};
    bool ok = true;
    for (const std::string& s : suites) {
        const ValidationReport r = validate_suite(s);
        for (const ValidationCheck& c : r.checks)
            std::printf("%-4s %-10s %-44s measured %.3e  tolerance %.3e\n", c.passed ? "ok" : "FAIL", s.c_str(),
                        c.name.c_str(), c.measured, c.tolerance);
        std::printf("%s: %s\n", s.c_str(), r.passed() ? "pass" : "FAIL");
        ok = ok && r.passed();
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SVD of the photoacoustic wave forward operator with radial sound speed"};
    app.require_subcommand(1);
    std::string simd;
    app.add_option("--simd", simd, "kernel level override")->check(CLI::IsMember({"scalar", "avx2"}));

    ModeOptions mode_opt;
    std::string out;
    auto* modes = app.add_subcommand("modes", "solve and list radial modes");
    mode_opt.attach(modes);
    modes->add_option("--out", out, "write PATMODE1 records here");

    ModeOptions gram_opt;
    auto* gram = app.add_subcommand("gram", "orthonormality check of a mode family");
    gram_opt.attach(gram);

    std::string config_path, preset = "desk", profile, bc, method, data;
    std::optional<double> horizon;
    std::optional<std::size_t> count;
    auto attach_run = [&](CLI::App* c) {
        c->add_option("--config", config_path, "RunConfig JSON");
        c->add_option("--preset", preset, "desk or paper-scale when no config is given");
        c->add_option("--profile", profile, "override the profile");
        c->add_option("--bc", bc, "override the boundary condition")->check(CLI::IsMember({"neumann", "dirichlet"}));
        c->add_option("--horizon", horizon, "override the horizon A");
        c->add_option("--modes", count, "override the mode count");
        c->add_option("--data", data, "fdtd or spectral")->check(CLI::IsMember({"fdtd", "spectral"}));
    };
    auto apply_overrides = [&](RunConfig cfg) {
        if (!profile.empty()) cfg.profile = profile;
        if (!bc.empty()) cfg.bc = parse_boundary_condition(bc);
        if (!method.empty()) cfg.method = method;
        if (!data.empty()) cfg.data = data;
        if (horizon) cfg.horizon = *horizon;
        if (count) cfg.mode_count = *count;
        if (!out.empty()) cfg.output = out;
        return cfg;
    };

    auto* forward = app.add_subcommand("forward", "simulate boundary data for a phantom");
    attach_run(forward);
    forward->add_option("--out", out, "trace file (.trace or .csv)")->required();

    ModeOptions rec_opt;
    std::string trace_path;
    double reg = 0.0;
    auto* reconstruct = app.add_subcommand("reconstruct", "recover coefficients from a trace file");
    rec_opt.attach(reconstruct);
    reconstruct->add_option("--trace", trace_path, "PATTRAC1 trace")->required();
    reconstruct->add_option("--method", method, "direct or lsq")->check(CLI::IsMember({"direct", "lsq"}));
    reconstruct->add_option("--reg", reg, "ridge parameter for lsq");
    reconstruct->add_option("--out", out, "output directory")->required();

    auto* pipeline = app.add_subcommand("pipeline", "end-to-end run writing a manifest");
    attach_run(pipeline);
    pipeline->add_option("--method", method, "direct or lsq")->check(CLI::IsMember({"direct", "lsq"}));
    pipeline->add_option("--out", out, "output directory");

    std::string suite = "all";
    auto* validate = app.add_subcommand("validate", "run validation suites");
    validate->add_option("suite", suite, "bessel, gram, prop1, crossfdtd, dirichlet, classify or all");

    std::string grid_path;
    std::size_t size = 256;
    auto* exp = app.add_subcommand("export", "write a PATGRID1 grid as a 16-bit PGM image");
    exp->add_option("--grid", grid_path, "PATGRID1 file")->required();
    exp->add_option("--out", out, "PGM path")->required();
    exp->add_option("--size", size, "raster size in pixels");

    CLI11_PARSE(app, argc, argv);
    try {
        if (!simd.empty()) simd::set_level(simd == "avx2" ? simd::Level::Avx2 : simd::Level::Scalar);
        if (*modes) return cmd_modes(mode_opt, out);
        if (*gram) return cmd_gram(gram_opt);
        if (*forward) return cmd_forward(apply_overrides(base_config(config_path, preset)), out);
        if (*reconstruct) return cmd_reconstruct(rec_opt, trace_path, method.empty() ? "direct" : method, reg, out);
        if (*pipeline) return cmd_pipeline(apply_overrides(base_config(config_path, preset)));
        if (*validate) return cmd_validate(suite);
        if (*exp) {
            export_image(io::read_grid(grid_path), out, size);
            return 0;
        }
    } catch (const StageError& e) {
        std::fprintf(stderr, "error [%s] in stage %s\n", e.kind(), e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error [%s]: %s\n", e.kind(), e.what());
        return 2;
    }
    return 0;
}
