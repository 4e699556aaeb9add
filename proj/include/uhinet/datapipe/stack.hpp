#pragma once

#include <filesystem>
#include <vector>

#include "uhinet/datapipe/calendar.hpp"
#include "uhinet/datapipe/raster.hpp"

namespace uhinet::data {

// Hourly grids for a list of days: grids[day][hour], 24 per day.
struct GridStack {
  std::vector<Date> dates;
  std::vector<std::vector<RasterGrid>> grids;

  // Throws DataError on a ragged stack or grids of differing shape.
  void validate() const;
  std::size_t width() const { return grids.at(0).at(0).width; }
  std::size_t height() const { return grids.at(0).at(0).height; }
};

// On disk: <dir>/<YYYY-MM-DD>/hHH.grd
std::filesystem::path stack_file(const std::filesystem::path& dir, Date d, int hour);
void write_stack(const std::filesystem::path& dir, const GridStack& stack);
GridStack read_stack(const std::filesystem::path& dir, const std::vector<Date>& dates);
// Dates with a sub-directory in `dir`, ascending.
std::vector<Date> stack_dates(const std::filesystem::path& dir);

}  // namespace uhinet::data
