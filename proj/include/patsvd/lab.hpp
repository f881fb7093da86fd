#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "patsvd/modal_basis.hpp"
#include "patsvd/speed_profile.hpp"
#include "patsvd/svd_inversion.hpp"

namespace patsvd {

/// Presets: "c1[:scale]", "c2[:inner:outer[:inside:outside]]", "const:<v>",
/// "table:r/v,r/v,...". Throws ConfigError for anything else.
SoundSpeedProfile make_profile(const std::string& spec);

enum class PhantomKind { GaussianBump, Disk, Ring, ModeCombination };
std::string to_string(PhantomKind kind);
PhantomKind parse_phantom_kind(const std::string& s);

struct PhantomFeature {
    std::vector<double> center{0.0, 0.0}; // 2 or 3 coordinates
    double size = 0.1;                    // Gaussian width, disk radius or ring radius
    double width = 0.05;                  // ring thickness
    double amplitude = 1.0;
};

struct PhantomSpec {
    PhantomKind kind = PhantomKind::GaussianBump;
    std::vector<PhantomFeature> features;
    ModalCoefficients coefficients; // mode-combination only

    /// Largest |center| + extent, where a Gaussian extends 3 widths.
    double support_radius() const;
};

/// Throws ConfigError when the support reaches the boundary sphere.
void validate_phantom(const PhantomSpec& spec, int dimension);

/// Samples the phantom. Mode combinations need `modes` covering every coefficient.
GridFunction make_phantom(const PhantomSpec& spec, const RadialGrid& radial, const AngularGrid& angular,
                          std::span<const Mode> modes = {});

struct RunConfig {
    std::string profile = "c1";
    PhantomSpec phantom;
    int dimension = 2;
    // truncation: mu_max if set, else l_max/k_max if both set, else the mode_count lowest
    std::size_t mode_count = 300;
    std::optional<double> mu_max;
    std::optional<int> l_max;
    std::optional<int> k_max;
    std::size_t radial_cells = 512;
    std::size_t angular_points = 0; // 0: smallest admissible
    std::size_t colatitude_points = 0;
    double horizon = 200.0;
    double dt = 0.0; // 0: largest admissible
    double cfl = 0.45;
    BoundaryCondition bc = BoundaryCondition::Neumann;
    std::string data = "fdtd"; // fdtd | spectral
    std::string method = "direct"; // direct | lsq
    double regularization = 0.0;
    double noise = 0.0;
    std::uint64_t seed = 1;
    std::size_t image_size = 256;
    std::string output = "run";

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::filesystem::path& path);
    /// Every guard that does not need the modes. Throws ConfigError.
    void validate() const;
};

/// Desk-scale default and the "paper-scale" provenance preset.
RunConfig preset_config(const std::string& name);

/// Pipeline failure tagged with the stage that raised it; kind() is the original kind.
class StageError : public Error {
public:
    StageError(const std::string& stage, const Error& cause)
        : Error(cause.kind(), stage + ": " + cause.what()), stage_(stage) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct PipelineResult {
    nlohmann::json manifest;
    double relative_error = 0.0;    // L^2(c^{-1})
    double relative_error_l2 = 0.0; // plain L^2
    ReconstructionReport report;
};

/// modes -> data -> inversion -> synthesis; writes every artifact and
/// manifest.json into config.output.
PipelineResult run_pipeline(const RunConfig& config);

/// Real part on a size x size raster over [-1, 1]^2; NaN outside the disk.
std::vector<double> rasterize(const GridFunction& g, std::size_t size);
/// Bilinear resampling of a raster from `rasterize` back onto a polar grid.
GridFunction polar_from_raster(std::span<const double> raster, std::size_t size, const RadialGrid& radial,
                               const AngularGrid& angular);
/// 16-bit binary PGM of the real part, min-max scaled, zero outside the disk.
void export_image(const GridFunction& g, const std::filesystem::path& path, std::size_t size = 256);

struct ValidationCheck {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct ValidationReport {
    std::string suite;
    std::vector<ValidationCheck> checks;
    bool passed() const;
};

std::vector<std::string> validation_suites();
/// Throws ConfigError for an unknown suite.
ValidationReport validate_suite(const std::string& suite);

/// Relative error sqrt(<a-b, a-b> / <b, b>) in L^2(c^{-1}).
double relative_weighted_error(const GridFunction& a, const GridFunction& b, const SoundSpeedProfile& profile);
/// The same with c = 1.
double relative_l2_error(const GridFunction& a, const GridFunction& b);

} // namespace patsvd
