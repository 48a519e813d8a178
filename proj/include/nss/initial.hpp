#pragma once

#include <cstdint>

#include "nss/grid.hpp"

namespace nss {

/// Independent uniform values in [-amplitude, amplitude] per grid point, mean removed.
RealField2D random_field(const GridSpec& grid, std::uint64_t seed, double amplitude = 0.05);

/// Random trigonometric polynomial with modes |k|, |l| <= max_mode, scaled to
/// max |u - offset| = amplitude, plus a constant offset.
RealField2D smooth_random_field(const GridSpec& grid, std::uint64_t seed, int max_mode = 6,
                                double amplitude = 1.0, double offset = 0.0);

}  // namespace nss
