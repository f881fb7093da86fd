#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "patsvd/modal_basis.hpp"
#include "patsvd/radial_eigensolver.hpp"
#include "patsvd/svd_inversion.hpp"
#include "patsvd/wave_forward.hpp"

namespace patsvd::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

/// Mode files: one "PATMODE1" record per mode, back to back.
void write_modes(const fs::path& path, std::span<const RadialMode> modes);
std::vector<RadialMode> read_modes(const fs::path& path);

/// "PATGRID1" grid files.
void write_grid(const fs::path& path, const GridFunction& g);
GridFunction read_grid(const fs::path& path);
/// r,theta,re,im (2D) or r,colatitude,azimuth,re,im (3D).
void write_grid_csv(const fs::path& path, const GridFunction& g);

/// "PATTRAC1" trace files hold real samples on a circle. Throws TypeError if the
/// trace has a non-negligible imaginary part and ShapeError for 3D traces.
void write_trace(const fs::path& path, const BoundaryTrace& trace);
BoundaryTrace read_trace(const fs::path& path);
void write_trace_csv(const fs::path& path, const BoundaryTrace& trace);

json to_json(const ModeIndex& index);
ModeIndex mode_index_from_json(const json& j);
json to_json(const ModalCoefficients& coeffs);
ModalCoefficients coefficients_from_json(const json& j);
json to_json(const ReconstructionReport& report);

void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);

} // namespace patsvd::io
