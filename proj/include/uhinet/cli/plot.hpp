#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "uhinet/datapipe/raster.hpp"

namespace uhinet::cli {

struct ColorScale {
  double min = 0.0;
  double max = 1.0;
};

// Blue-white-red ramp; t is clamped to [0, 1].
std::array<std::uint8_t, 3> ramp_color(double t);

// Binary PPM (P6), one pixel per cell, row 0 at the top. Nodata cells are
// grey. Throws DataError on an empty grid.
std::string encode_ppm(const data::RasterGrid& grid, const ColorScale& scale);

// Range over the valid cells of every grid; throws DataError when none exist.
ColorScale common_scale(const std::vector<data::RasterGrid>& grids);

// <stem>.ppm per grid plus scale.json {min, max, units, files}.
void emit_plots(const std::vector<std::pair<std::string, data::RasterGrid>>& grids, const std::filesystem::path& out,
                const ColorScale& scale);

}  // namespace uhinet::cli
