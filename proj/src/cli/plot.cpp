#include "uhinet/cli/plot.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "uhinet/errors.hpp"

namespace uhinet::cli {

std::array<std::uint8_t, 3> ramp_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto channel = [](double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  if (t < 0.5) {
    const double s = t / 0.5;
    return {channel(s), channel(s), 255};
  }
  const double s = (t - 0.5) / 0.5;
  return {255, channel(1.0 - s), channel(1.0 - s)};
}

std::string encode_ppm(const data::RasterGrid& grid, const ColorScale& scale) {
  if (grid.width == 0 || grid.height == 0 || grid.values.empty()) throw DataError("plot: empty grid");
  const std::string header = "P6\n" + std::to_string(grid.width) + " " + std::to_string(grid.height) + "\n255\n";
  std::string out = header;
  out.reserve(header.size() + grid.values.size() * 3);
  const double span = scale.max - scale.min;
  for (std::size_t y = 0; y < grid.height; ++y) {
    for (std::size_t x = 0; x < grid.width; ++x) {
      std::array<std::uint8_t, 3> rgb{128, 128, 128};
      if (!grid.is_nodata(x, y)) {
        const double t = span > 0.0 ? (grid.at(x, y) - scale.min) / span : 0.5;
        rgb = ramp_color(t);
      }
      out.append(reinterpret_cast<const char*>(rgb.data()), 3);
    }
  }
  return out;
}

ColorScale common_scale(const std::vector<data::RasterGrid>& grids) {
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& g : grids) {
    for (std::size_t i = 0; i < g.values.size(); ++i) {
      if (!g.nodata.empty() && g.nodata[i]) continue;
      lo = std::min<double>(lo, g.values[i]);
      hi = std::max<double>(hi, g.values[i]);
    }
  }
  if (!(lo <= hi)) throw DataError("plot: no valid cells to scale");
  return {lo, hi};
}

void emit_plots(const std::vector<std::pair<std::string, data::RasterGrid>>& grids, const std::filesystem::path& out,
                const ColorScale& scale) {
  if (grids.empty()) throw DataError("plot: nothing to plot");
  nlohmann::json files = nlohmann::json::array();
  for (const auto& [stem, grid] : grids) {
    data::write_file(out / (stem + ".ppm"), encode_ppm(grid, scale));
    files.push_back(stem + ".ppm");
  }
  const nlohmann::json sidecar = {{"min", scale.min},
                                  {"max", scale.max},
                                  {"units", std::string(data::units_name(grids.front().second.units))},
                                  {"palette", "blue-white-red"},
                                  {"nodata_rgb", {128, 128, 128}},
                                  {"files", files}};
  data::write_file(out / "scale.json", sidecar.dump(2) + "\n");
}

}  // namespace uhinet::cli
