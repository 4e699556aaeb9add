#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uhinet/datapipe/calendar.hpp"
#include "uhinet/datapipe/stack.hpp"

namespace uhinet::eval {

inline constexpr double kDefaultMapeEpsilon = 1e-6;

struct MetricsRecord {
  std::optional<double> pearson;  // empty when either series is constant
  double rmse = 0.0;
  double mae = 0.0;
  std::optional<double> mape;     // percent; empty when every term was excluded
  std::size_t n = 0;
  std::size_t excluded_mape_terms = 0;
};

// Population-moment Pearson correlation. Throws NumericError when either
// series has zero variance, DimensionError on length mismatch or n < 2.
double pearson(std::span<const double> observed, std::span<const double> predicted);

// All four metrics; MAPE skips terms with |observed| < mape_epsilon and counts them.
MetricsRecord regression_metrics(std::span<const double> observed, std::span<const double> predicted,
                                 double mape_epsilon = kDefaultMapeEpsilon);

struct StationSpec {
  std::string name;
  std::size_t x = 0;
  std::size_t y = 0;
  std::optional<std::filesystem::path> series_file;
  std::vector<data::HourStamp> real_times;  // hourly measurements when a series file is given
  std::vector<double> real_values;
};

// stations.json: [{name, x, y, series_file?}]; series files are CSV
// `timestamp,t_degC` resolved relative to the stations file.
std::vector<StationSpec> read_stations(const std::filesystem::path& path);

// Series ordered by (day, hour). Throws ConfigError for an out-of-bounds pixel
// and DataError when the pixel holds nodata.
std::vector<double> extract_station_series(const data::GridStack& stack, const StationSpec& station);

// Per-hour pixelwise mean over days (nodata only where every day lacks data).
std::vector<data::RasterGrid> hourly_aggregate(const data::GridStack& stack);

struct ReportRow {
  std::string station;
  std::string comparison;  // A-vs-B, A-vs-real, B-vs-real
  MetricsRecord metrics;
};

// Rows per station (in name order): A-vs-B always (B as the reference), plus
// A-vs-real and B-vs-real when the station carries measurements.
// Throws DataError when the stacks or measurements do not share a time base.
std::vector<ReportRow> station_report(const std::vector<StationSpec>& stations, const data::GridStack& model_a,
                                      const data::GridStack& model_b, double mape_epsilon = kDefaultMapeEpsilon);

std::string report_csv(const std::vector<ReportRow>& rows);

}  // namespace uhinet::eval
