#include "uhinet/datapipe/raster.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "uhinet/errors.hpp"

namespace uhinet::data {

using nlohmann::json;

std::string_view units_name(Units u) {
  switch (u) {
    case Units::celsius: return "degC";
    case Units::meters: return "m";
    case Units::fraction: return "fraction";
    case Units::category: return "category";
    case Units::percent: return "percent";
  }
  return "?";
}

Units parse_units(std::string_view s) {
  for (Units u : {Units::celsius, Units::meters, Units::fraction, Units::category, Units::percent}) {
    if (units_name(u) == s) return u;
  }
  throw FormatError("unknown units tag '" + std::string(s) + "'");
}

RasterGrid RasterGrid::filled(std::size_t width, std::size_t height, Units units, float value) {
  RasterGrid g;
  g.width = width;
  g.height = height;
  g.units = units;
  g.values.assign(width * height, value);
  return g;
}

void RasterGrid::set_nodata(std::size_t x, std::size_t y) {
  if (nodata.empty()) nodata.assign(values.size(), 0);
  nodata[y * width + x] = 1;
}

bool RasterGrid::has_nodata() const {
  for (auto m : nodata) {
    if (m) return true;
  }
  return false;
}

void RasterGrid::validate() const {
  if (width * height != values.size()) {
    throw DataError("raster: " + std::to_string(width) + "x" + std::to_string(height) + " grid holds " +
                    std::to_string(values.size()) + " values");
  }
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) throw DataError("raster: cell size must be positive");
  if (!nodata.empty() && nodata.size() != values.size()) throw DataError("raster: nodata mask size mismatch");
}

RasterGrid RasterGrid::crop(std::size_t x0, std::size_t y0, std::size_t w, std::size_t h) const {
  if (x0 + w > width || y0 + h > height) throw DimensionError("raster: crop window outside grid");
  RasterGrid out;
  out.width = w;
  out.height = h;
  out.cell_size = cell_size;
  out.origin_x = origin_x + static_cast<double>(x0) * cell_size;
  out.origin_y = origin_y - static_cast<double>(y0) * cell_size;
  out.units = units;
  out.values.resize(w * h);
  if (!nodata.empty()) out.nodata.resize(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      out.values[y * w + x] = at(x0 + x, y0 + y);
      if (!nodata.empty()) out.nodata[y * w + x] = nodata[(y0 + y) * width + x0 + x];
    }
  }
  return out;
}

std::string encode_grd1(const RasterGrid& grid) {
  grid.validate();
  json header = {{"magic", "GRD1"},
                 {"width", grid.width},
                 {"height", grid.height},
                 {"cell_size_m", grid.cell_size},
                 {"units", units_name(grid.units)},
                 {"nodata", grid.has_nodata() ? json(kGrdNodata) : json(nullptr)},
                 {"origin_x_m", grid.origin_x},
                 {"origin_y_m", grid.origin_y}};
  std::string out = header.dump();
  out.push_back('\n');
  const std::size_t offset = out.size();
  out.resize(offset + grid.values.size() * 4);
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    const float v = grid.is_nodata(i % grid.width, i / grid.width) ? kGrdNodata : grid.values[i];
    auto bits = std::bit_cast<std::uint32_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    std::memcpy(out.data() + offset + i * 4, &bits, 4);
  }
  return out;
}

RasterGrid decode_grd1(std::string_view bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string_view::npos) throw FormatError("GRD1: missing header line");
  json header;
  try {
    header = json::parse(bytes.substr(0, nl));
  } catch (const json::exception& e) {
    throw FormatError(std::string("GRD1: bad header: ") + e.what());
  }
  RasterGrid g;
  std::optional<float> nodata_value;
  try {
    if (header.at("magic").get<std::string>() != "GRD1") throw FormatError("GRD1: bad magic");
    g.width = header.at("width").get<std::size_t>();
    g.height = header.at("height").get<std::size_t>();
    g.cell_size = header.at("cell_size_m").get<double>();
    g.units = parse_units(header.at("units").get<std::string>());
    if (!header.at("nodata").is_null()) nodata_value = header.at("nodata").get<float>();
    g.origin_x = header.value("origin_x_m", 0.0);
    g.origin_y = header.value("origin_y_m", 0.0);
  } catch (const json::exception& e) {
    throw FormatError(std::string("GRD1: bad header field: ") + e.what());
  }
  const std::size_t n = g.width * g.height;
  if (bytes.size() - nl - 1 != n * 4) {
    throw FormatError("GRD1: expected " + std::to_string(n * 4) + " payload bytes, found " +
                      std::to_string(bytes.size() - nl - 1));
  }
  g.values.resize(n);
  const char* payload = bytes.data() + nl + 1;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, payload + i * 4, 4);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    g.values[i] = std::bit_cast<float>(bits);
    if (nodata_value && g.values[i] == *nodata_value) {
      if (g.nodata.empty()) g.nodata.assign(n, 0);
      g.nodata[i] = 1;
    }
  }
  try {
    g.validate();
  } catch (const DataError& e) {
    throw FormatError(std::string("GRD1: ") + e.what());
  }
  return g;
}

void write_grd1(const std::filesystem::path& path, const RasterGrid& grid) { write_file(path, encode_grd1(grid)); }

RasterGrid read_grd1(const std::filesystem::path& path) {
  try {
    return decode_grd1(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace uhinet::data
