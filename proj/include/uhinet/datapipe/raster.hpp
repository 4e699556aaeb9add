#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace uhinet::data {

enum class Units { celsius, meters, fraction, category, percent };

std::string_view units_name(Units u);
Units parse_units(std::string_view s);

// Row-major H x W scalar field. values[y * width + x]; y grows southwards.
struct RasterGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  double cell_size = 100.0;  // meters
  double origin_x = 0.0;     // meters, north-west corner
  double origin_y = 0.0;
  Units units = Units::celsius;
  std::vector<float> values;
  std::vector<std::uint8_t> nodata;  // empty means every cell is valid

  static RasterGrid filled(std::size_t width, std::size_t height, Units units, float value = 0.0F);

  std::size_t size() const { return values.size(); }
  float& at(std::size_t x, std::size_t y) { return values[y * width + x]; }
  float at(std::size_t x, std::size_t y) const { return values[y * width + x]; }

  bool is_nodata(std::size_t x, std::size_t y) const { return !nodata.empty() && nodata[y * width + x] != 0; }
  void set_nodata(std::size_t x, std::size_t y);
  bool has_nodata() const;

  // Throws DataError when the invariants (width*height == values, cell_size > 0) fail.
  void validate() const;

  RasterGrid crop(std::size_t x0, std::size_t y0, std::size_t w, std::size_t h) const;

  bool operator==(const RasterGrid&) const = default;
};

inline constexpr float kGrdNodata = -9999.0F;

// GRD1: one JSON header line, '\n', then width*height little-endian float32, row-major.
// Nodata cells are written as the header's "nodata" value.
std::string encode_grd1(const RasterGrid& grid);
RasterGrid decode_grd1(std::string_view bytes);

void write_grd1(const std::filesystem::path& path, const RasterGrid& grid);
RasterGrid read_grd1(const std::filesystem::path& path);

// Whole-file helpers shared by the file formats.
std::string read_file(const std::filesystem::path& path);
// Writes via a temporary sibling and rename, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace uhinet::data
