#include <algorithm>
#include <cstdint>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "patsvd/error.hpp"
#include "patsvd/lab.hpp"

namespace patsvd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double pixel_coord(std::size_t i, std::size_t size) {
    return -1.0 + (static_cast<double>(i) + 0.5) * 2.0 / static_cast<double>(size);
}

} // namespace

std::vector<double> rasterize(const GridFunction& g, std::size_t size) {
    if (g.dimension() != 2) throw ShapeError("images are 2D only");
    if (size < 2) throw ConfigError("image size must be at least 2");
    const std::size_t n = g.radial().size();
    const std::size_t na = g.angular().size();
    std::vector<double> out(size * size, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t row = 0; row < size; ++row) {
        const double y = -pixel_coord(row, size);
        for (std::size_t col = 0; col < size; ++col) {
            const double x = pixel_coord(col, size);
            const double r = std::hypot(x, y);
            if (r > 1.0) continue;
            const double s = std::clamp(r * static_cast<double>(n) - 0.5, 0.0, static_cast<double>(n - 1));
            const auto j0 = std::min(static_cast<std::size_t>(s), n - 2);
            const double tr = s - static_cast<double>(j0);
            double theta = std::atan2(y, x);
            if (theta < 0.0) theta += kTwoPi;
            const double u = theta / kTwoPi * static_cast<double>(na);
            const auto a0 = static_cast<std::size_t>(u) % na;
            const std::size_t a1 = (a0 + 1) % na;
            const double ta = u - std::floor(u);
            const double v0 = (1.0 - ta) * g.at(j0, a0).real() + ta * g.at(j0, a1).real();
            const double v1 = (1.0 - ta) * g.at(j0 + 1, a0).real() + ta * g.at(j0 + 1, a1).real();
            out[row * size + col] = (1.0 - tr) * v0 + tr * v1;
        }
    }
    return out;
}

GridFunction polar_from_raster(std::span<const double> raster, std::size_t size, const RadialGrid& radial,
                               const AngularGrid& angular) {
    if (angular.dimension() != 2) throw ShapeError("images are 2D only");
    if (raster.size() != size * size) throw ShapeError("raster does not have size x size pixels");
    GridFunction g(radial, angular);
    const double half = static_cast<double>(size) / 2.0;
    for (std::size_t j = 0; j < radial.size(); ++j)
        for (std::size_t a = 0; a < angular.size(); ++a) {
            const double x = radial.node(j) * std::cos(angular.azimuth(a));
            const double y = radial.node(j) * std::sin(angular.azimuth(a));
            const double px = (x + 1.0) * half - 0.5;
            const double py = (1.0 - y) * half - 0.5;
            const double fx = std::floor(px), fy = std::floor(py);
            double acc = 0.0, wsum = 0.0;
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) {
                    const double cx = fx + dx, cy = fy + dy;
                    if (cx < 0 || cy < 0 || cx >= static_cast<double>(size) || cy >= static_cast<double>(size)) continue;
                    const double v = raster[static_cast<std::size_t>(cy) * size + static_cast<std::size_t>(cx)];
                    if (std::isnan(v)) continue;
                    const double w = (1.0 - std::abs(px - cx)) * (1.0 - std::abs(py - cy));
                    acc += w * v;
                    wsum += w;
                }
            g.at(j, a) = wsum > 0.0 ? acc / wsum : 0.0;
        }
    return g;
}

void export_image(const GridFunction& g, const std::filesystem::path& path, std::size_t size) {
    const std::vector<double> raster = rasterize(g, size);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : raster)
        if (!std::isnan(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const bool flat = !(hi - lo > 1e-12 * std::max(1.0, std::abs(hi)));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "P5\n" << size << ' ' << size << "\n65535\n";
    for (double v : raster) {
        std::uint16_t p = 0;
        if (!std::isnan(v)) p = flat ? 32768 : static_cast<std::uint16_t>(std::lround((v - lo) / (hi - lo) * 65535.0));
        const char bytes[2] = {static_cast<char>(p >> 8), static_cast<char>(p & 0xff)};
        out.write(bytes, 2);
    }
    out.flush();
    if (!out) throw IoError("write to " + path.string() + " failed");
}

} // namespace patsvd
