#pragma once

#include <cstddef>
#include <vector>

#include "patsvd/error.hpp"

namespace patsvd {

/// Cell-centred partition of (0, 1]: node j sits at (j + 1/2) / n_cells, so no
/// node touches the singular endpoint r = 0.
class RadialGrid {
public:
    explicit RadialGrid(std::size_t n_cells) : n_(n_cells) {
        if (n_cells == 0) throw ConfigError("radial grid needs at least one cell");
    }

    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return 1.0 / static_cast<double>(n_); }
    /// Centre of cell j (0-based).
    double node(std::size_t j) const noexcept { return (static_cast<double>(j) + 0.5) / static_cast<double>(n_); }
    /// Face between cells j-1 and j; face(0) = 0 and face(n) = 1.
    double face(std::size_t j) const noexcept { return static_cast<double>(j) / static_cast<double>(n_); }

    std::vector<double> nodes() const {
        std::vector<double> r(n_);
        for (std::size_t j = 0; j < n_; ++j) r[j] = node(j);
        return r;
    }

    friend bool operator==(const RadialGrid&, const RadialGrid&) = default;

private:
    std::size_t n_;
};

} // namespace patsvd
