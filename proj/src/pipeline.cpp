#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <set>

#include "patsvd/error.hpp"
#include "patsvd/io.hpp"
#include "patsvd/lab.hpp"
#include "patsvd/parallel.hpp"

namespace patsvd {

using nlohmann::json;

namespace {

template <class F>
auto stage(const char* name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(name, e);
    }
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<Mode> select_modes(const RunConfig& c, const SoundSpeedProfile& profile, const RadialGrid& grid) {
    if (c.mu_max) return enumerate_modes(profile, grid, c.bc, c.dimension, *c.mu_max);
    if (c.l_max) return enumerate_modes_rect(profile, grid, c.bc, c.dimension, *c.l_max, *c.k_max);
    return lowest_modes(profile, grid, c.bc, c.dimension, c.mode_count);
}

AngularGrid select_angular(const RunConfig& c, int l_max) {
    const std::size_t need_azim = 2 * static_cast<std::size_t>(l_max) + 2;
    if (c.angular_points != 0 && c.angular_points < need_azim)
        throw ConfigError("angular_points = " + std::to_string(c.angular_points) + " cannot resolve |l| = " +
                          std::to_string(l_max) + " (need at least " + std::to_string(need_azim) + ")");
    const std::size_t n_azim = c.angular_points != 0 ? c.angular_points : need_azim;
    if (c.dimension == 2) return AngularGrid::circle(n_azim);
    const std::size_t need_colat = static_cast<std::size_t>(l_max) + 1;
    if (c.colatitude_points != 0 && c.colatitude_points < need_colat)
        throw ConfigError("colatitude_points = " + std::to_string(c.colatitude_points) + " cannot resolve l = " +
                          std::to_string(l_max));
    return AngularGrid::sphere(c.colatitude_points != 0 ? c.colatitude_points : need_colat, n_azim);
}

TimeGrid select_time(const RunConfig& c, double mu_max) {
    if (c.dt == 0.0) return TimeGrid::for_horizon(c.horizon, mu_max);
    const auto steps = static_cast<std::size_t>(std::llround(c.horizon / c.dt));
    if (std::abs(static_cast<double>(steps) * c.dt - c.horizon) > 1e-9 * c.horizon)
        throw ConfigError("horizon must be a whole number of time steps");
    TimeGrid t{c.dt, steps};
    t.check(mu_max);
    return t;
}

} // namespace

PipelineResult run_pipeline(const RunConfig& config) {
    stage("config", [&] { config.validate(); });
    const SoundSpeedProfile profile = stage("profile", [&] { return make_profile(config.profile); });
    const RadialGrid radial(config.radial_cells);

    const std::vector<Mode> modes = stage("modes", [&] { return select_modes(config, profile, radial); });
    if (modes.empty()) throw StageError("modes", ConfigError("truncation selects no modes"));
    double mu_max = 0.0;
    for (const Mode& m : modes) mu_max = std::max(mu_max, m.mu());
    const int l_max = max_angular_index(modes);

    // every remaining guard before the expensive stages
    const AngularGrid angular = stage("guards", [&] { return select_angular(config, l_max); });
    const TimeGrid time = stage("guards", [&] { return select_time(config, mu_max); });
    stage("guards", [&] {
        if (config.method == "lsq") {
            const double bytes = 16.0 * static_cast<double>(modes.size()) * static_cast<double>(time.n_steps) *
                                 static_cast<double>(angular.size());
            if (bytes > 2.0 * 1024 * 1024 * 1024)
                throw ConfigError("lsq basis would need " + std::to_string(bytes / (1 << 30)) +
                                  " GiB; reduce modes or horizon, or use method = direct");
        }
    });
    const std::vector<SvdTriple> triples = stage("modes", [&] { return make_triples(modes); });

    const GridFunction phantom = stage("phantom", [&] { return make_phantom(config.phantom, radial, angular, modes); });

    double energy_drift = 0.0;
    BoundaryTrace data = stage("forward", [&] {
        if (config.data == "spectral") {
            const ModalCoefficients x = project(phantom, modes, profile);
            return triple_forward(x, triples, time, angular);
        }
        const FdtdConfig fc{config.radial_cells, angular.size(), config.cfl};
        FdtdResult r = forward_fdtd_detailed(phantom, profile, fc, time);
        energy_drift = r.energy_drift();
        return std::move(r.trace);
    });
    if (config.noise > 0.0) data = add_noise(data, config.noise, config.seed);

    ReconstructionReport report = stage("inversion", [&] {
        if (config.method == "direct") return recover_all(data, triples);
        std::vector<BoundaryTrace> basis;
        if (config.data == "spectral") {
            basis = spectral_basis(triples, time, angular);
        } else {
            const FdtdConfig fc{config.radial_cells, angular.size(), config.cfl};
            basis.resize(modes.size(), BoundaryTrace(angular, time));
            parallel_for(modes.size(), [&](std::size_t i) {
                basis[i] = forward_fdtd(sample_mode(modes[i], radial, angular), profile, fc, time);
            });
        }
        std::vector<ModeIndex> labels;
        for (const Mode& m : modes) labels.push_back(m.index);
        ReconstructionReport r;
        r.coefficients = algorithm1_lsq(data, basis, labels, config.regularization);
        r.coefficients.truncation.mu_max = mu_max;
        r.mode_count = modes.size();
        r.horizon = time.horizon();
        r.crosstalk = crosstalk_bound(triples, time.horizon());
        r.method = "lsq";
        r.regularization = config.regularization;
        BoundaryTrace model = triple_forward(r.coefficients, triples, time, angular);
        model -= data;
        r.residual = l2_norm(model) / std::max(l2_norm(data), 1e-300);
        return r;
    });

    const GridFunction recon = stage("synthesis", [&] { return synthesize(report.coefficients, modes, radial, angular); });
    GridFunction error = recon;
    error -= phantom;

    PipelineResult result;
    result.report = report;
    result.relative_error = relative_weighted_error(recon, phantom, profile);
    result.relative_error_l2 = relative_l2_error(recon, phantom);

    stage("write", [&] {
        const io::fs::path dir(config.output);
        std::error_code ec;
        io::fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
        std::map<std::string, io::fs::path> artifacts;
        auto add = [&](const std::string& name) {
            artifacts[name] = dir / name;
            return dir / name;
        };
        io::write_json(add("config.json"), config.to_json());
        {
            std::vector<RadialMode> unique;
            std::set<const RadialMode*> seen;
            for (const Mode& m : modes)
                if (seen.insert(m.radial.get()).second) unique.push_back(*m.radial);
            io::write_modes(add("modes.bin"), unique);
        }
        io::write_grid(add("phantom.grid"), phantom);
        io::write_grid(add("reconstruction.grid"), recon);
        io::write_grid(add("error.grid"), error);
        if (config.dimension == 2 && data.max_imag() <= 1e-10 * std::max(l2_norm(data), 1e-300)) {
            io::write_trace(add("trace.trace"), data);
        } else {
            io::write_trace_csv(add("trace.csv"), data);
        }
        io::write_json(add("report.json"), io::to_json(report));
        if (config.dimension == 2) {
            export_image(phantom, add("phantom.pgm"), config.image_size);
            export_image(recon, add("reconstruction.pgm"), config.image_size);
        }
        json files = json::object();
        for (const auto& [name, path] : artifacts) files[name] = {{"path", name}, {"sha256", io::sha256_file(path)}};
        result.manifest = json{
            {"config", config.to_json()},
            {"artifacts", files},
            {"metrics",
             {{"relative_error_weighted", result.relative_error},
              {"relative_error_l2", result.relative_error_l2},
              {"residual", report.residual},
              {"crosstalk_bound", report.crosstalk},
              {"mode_count", modes.size()},
              {"horizon", time.horizon()},
              {"dt", time.dt},
              {"time_steps", time.n_steps},
              {"angular_points", angular.size()},
              {"mu_max", mu_max},
              {"fdtd_energy_drift", energy_drift},
              {"degenerate_clusters", report.degenerate_clusters.size()}}},
            {"run", {{"timestamp", utc_timestamp()}}},
        };
        io::write_json(dir / "manifest.json", result.manifest);
    });
    return result;
}

} // namespace patsvd
