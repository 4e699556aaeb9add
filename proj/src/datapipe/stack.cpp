#include "uhinet/datapipe/stack.hpp"

#include <algorithm>
#include <cstdio>

#include "uhinet/errors.hpp"

namespace uhinet::data {

void GridStack::validate() const {
  if (grids.empty()) throw DataError("grid stack is empty");
  if (grids.size() != dates.size()) throw DataError("grid stack: date list does not match the day count");
  const std::size_t w = grids[0].empty() ? 0 : grids[0][0].width;
  const std::size_t h = grids[0].empty() ? 0 : grids[0][0].height;
  for (std::size_t d = 0; d < grids.size(); ++d) {
    if (grids[d].size() != 24) {
      throw DataError("grid stack: " + format_date(dates[d]) + " has " + std::to_string(grids[d].size()) +
                      " of 24 hours");
    }
    for (const auto& g : grids[d]) {
      g.validate();
      if (g.width != w || g.height != h) throw DataError("grid stack: grids differ in shape on " + format_date(dates[d]));
    }
  }
}

std::filesystem::path stack_file(const std::filesystem::path& dir, Date d, int hour) {
  char name[16];
  std::snprintf(name, sizeof name, "h%02d.grd", hour);
  return dir / format_date(d) / name;
}

void write_stack(const std::filesystem::path& dir, const GridStack& stack) {
  stack.validate();
  for (std::size_t d = 0; d < stack.dates.size(); ++d) {
    for (int h = 0; h < 24; ++h) write_grd1(stack_file(dir, stack.dates[d], h), stack.grids[d][static_cast<std::size_t>(h)]);
  }
}

GridStack read_stack(const std::filesystem::path& dir, const std::vector<Date>& dates) {
  GridStack s;
  s.dates = dates;
  for (Date d : dates) {
    std::vector<RasterGrid> day;
    for (int h = 0; h < 24; ++h) {
      const auto path = stack_file(dir, d, h);
      if (!std::filesystem::exists(path)) throw DataError("missing grid " + path.string());
      day.push_back(read_grd1(path));
    }
    s.grids.push_back(std::move(day));
  }
  s.validate();
  return s;
}

std::vector<Date> stack_dates(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::vector<Date> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_directory()) continue;
    try {
      out.push_back(parse_date(entry.path().filename().string()));
    } catch (const DataError&) {
      // not a day directory
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace uhinet::data
