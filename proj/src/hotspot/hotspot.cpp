#include "uhinet/hotspot/hotspot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "json.hpp"
#include "uhinet/errors.hpp"

namespace uhinet::hotspot {

double neighborhood_mean(const data::RasterGrid& g, std::size_t x, std::size_t y) {
  if (x >= g.width || y >= g.height) throw DimensionError("neighborhood_mean: pixel out of bounds");
  double sum = 0.0;
  int count = 0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const auto xx = static_cast<std::ptrdiff_t>(x) + dx;
      const auto yy = static_cast<std::ptrdiff_t>(y) + dy;
      if (xx < 0 || yy < 0 || xx >= static_cast<std::ptrdiff_t>(g.width) || yy >= static_cast<std::ptrdiff_t>(g.height)) {
        continue;
      }
      if (g.is_nodata(static_cast<std::size_t>(xx), static_cast<std::size_t>(yy))) continue;
      sum += g.at(static_cast<std::size_t>(xx), static_cast<std::size_t>(yy));
      ++count;
    }
  }
  return count ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

double median(std::vector<double> v) {
  if (v.empty()) throw DataError("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

data::RasterGrid TrelMap::to_grid() const {
  data::RasterGrid g = data::RasterGrid::filled(width, height, data::Units::percent);
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (valid[i]) {
      g.values[i] = static_cast<float>(value[i]);
    } else {
      g.set_nodata(i % width, i / width);
    }
  }
  return g;
}

TrelMap trel_hour(const std::vector<data::RasterGrid>& days, double epsilon, int hour) {
  if (days.empty()) throw DataError("trel_hour: no grids");
  const std::size_t w = days[0].width;
  const std::size_t h = days[0].height;
  for (const auto& g : days) {
    g.validate();
    if (g.width != w || g.height != h) throw DimensionError("trel_hour: grids differ in shape");
  }
  TrelMap m;
  m.hour = hour;
  m.width = w;
  m.height = h;
  m.value.assign(w * h, 0.0);
  m.valid.assign(w * h, 0);
  m.day_count.assign(w * h, 0);
  std::vector<double> samples;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      samples.clear();
      bool masked = false;
      for (const auto& g : days) {
        if (g.is_nodata(x, y)) continue;
        const double t = g.at(x, y);
        if (std::abs(t) < epsilon) {
          masked = true;
          break;
        }
        const double mean = neighborhood_mean(g, x, y);
        if (std::isnan(mean)) continue;
        samples.push_back(100.0 * (t - mean) / t);
      }
      const std::size_t i = y * w + x;
      m.day_count[i] = static_cast<std::uint32_t>(samples.size());
      if (masked || samples.empty()) continue;
      m.value[i] = median(samples);
      m.valid[i] = 1;
    }
  }
  return m;
}

std::vector<TrelMap> trel_daily_cycle(const std::vector<std::vector<data::RasterGrid>>& stack, double epsilon) {
  if (stack.empty()) throw DataError("trel_daily_cycle: empty stack");
  for (std::size_t d = 0; d < stack.size(); ++d) {
    if (stack[d].size() != 24) {
      throw DataError("trel_daily_cycle: day " + std::to_string(d) + " has " + std::to_string(stack[d].size()) +
                      " of 24 hours");
    }
  }
  std::vector<TrelMap> out;
  std::vector<data::RasterGrid> hour_grids;
  for (int h = 0; h < 24; ++h) {
    hour_grids.clear();
    for (const auto& day : stack) hour_grids.push_back(day[static_cast<std::size_t>(h)]);
    out.push_back(trel_hour(hour_grids, epsilon, h));
  }
  return out;
}

void write_trel_maps(const std::filesystem::path& dir, const std::vector<TrelMap>& maps, double epsilon,
                     std::size_t day_count) {
  nlohmann::json hours = nlohmann::json::array();
  for (const auto& m : maps) {
    char name[16];
    std::snprintf(name, sizeof name, "h%02d.grd", m.hour);
    data::write_grd1(dir / name, m.to_grid());
    hours.push_back({{"hour", m.hour}, {"file", name}});
  }
  const nlohmann::json index = {{"hours", hours}, {"epsilon", epsilon}, {"day_count", day_count}};
  data::write_file(dir / "index.json", index.dump(2) + "\n");
}

}  // namespace uhinet::hotspot
