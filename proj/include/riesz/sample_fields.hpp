#pragma once

#include <cstdint>

#include "riesz/grid.hpp"

namespace riesz {

/// Spatial field whose transform is supported in |xi| <= band, with independent
/// standard normal real and imaginary parts on the lattice. Deterministic in seed.
Field random_band_limited(const GridSpec& grid, double band, std::uint64_t seed);

/// exp(-|x - centre|^2 / (2 width^2)).
Field gaussian_field(const GridSpec& grid, double width, const Point& centre = {0.0, 0.0});

}  // namespace riesz
