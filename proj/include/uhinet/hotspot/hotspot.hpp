#pragma once

// Relative-temperature hotspot index: per pixel and hour,
// 100 (T - mean of in-bounds 8-neighbours) / T, then the median over days.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "uhinet/datapipe/raster.hpp"

namespace uhinet::hotspot {

inline constexpr double kDefaultEpsilon = 0.5;  // degC

// Mean of the up-to-8 in-bounds neighbours of (x, y), skipping nodata cells.
// NaN when no neighbour is usable.
double neighborhood_mean(const data::RasterGrid& grid, std::size_t x, std::size_t y);

// Middle value for odd counts, mean of the two middle values for even counts.
double median(std::vector<double> values);

struct TrelMap {
  int hour = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> value;          // percent; meaningless where !valid
  std::vector<std::uint8_t> valid;
  std::vector<std::uint32_t> day_count;  // days contributing to each pixel

  data::RasterGrid to_grid() const;  // percent units, invalid cells as nodata
};

// One hour across days. A day contributes at a pixel when the pixel holds data
// there; the pixel is masked when no day contributes or any contributing
// |T_a| < epsilon. Throws DimensionError on shape mismatch.
TrelMap trel_hour(const std::vector<data::RasterGrid>& day_grids, double epsilon = kDefaultEpsilon, int hour = 0);

// stack[day][hour], 24 hours per day. Throws DataError on a ragged stack.
std::vector<TrelMap> trel_daily_cycle(const std::vector<std::vector<data::RasterGrid>>& stack,
                                      double epsilon = kDefaultEpsilon);

// hHH.grd per map plus index.json {hours, epsilon, day_count}.
void write_trel_maps(const std::filesystem::path& dir, const std::vector<TrelMap>& maps, double epsilon,
                     std::size_t day_count);

}  // namespace uhinet::hotspot
