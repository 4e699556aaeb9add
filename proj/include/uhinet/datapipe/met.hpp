#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "uhinet/datapipe/calendar.hpp"

namespace uhinet::data {

inline constexpr std::size_t kMetVars = 5;

struct MetRecord {
  HourStamp time = 0;
  double t2m = 0.0;     // degC
  double precip = 0.0;  // mm/h
  double q = 0.0;       // g/kg
  double u10 = 0.0;     // m/s, eastward
  double v10 = 0.0;     // m/s, northward

  // Model input order: t2m, precip, q, u10, v10.
  std::array<double, kMetVars> values() const { return {t2m, precip, q, u10, v10}; }
  bool operator==(const MetRecord&) const = default;
};

// Variable names in model input order, matching the manifest keys.
const std::array<const char*, kMetVars>& met_variable_names();

class MetSeries {
 public:
  MetSeries() = default;
  // Throws DataError when timestamps are not strictly increasing or a
  // calendar day present in the series is incomplete.
  explicit MetSeries(std::vector<MetRecord> rows);

  const std::vector<MetRecord>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  const MetRecord* find(HourStamp t) const;
  // Throws DataError naming the missing hour.
  const MetRecord& at(HourStamp t) const;

  // The 24 rows of a calendar day; throws DataError when absent.
  std::vector<MetRecord> day(Date d) const;
  std::vector<Date> dates() const;

  bool operator==(const MetSeries&) const = default;

 private:
  std::vector<MetRecord> rows_;
};

// CSV with header `timestamp,t2m_degC,precip_mmph,q_gkg,u10_ms,v10_ms`.
std::string encode_met_csv(const MetSeries& met);
MetSeries decode_met_csv(std::string_view text);
void write_met_csv(const std::filesystem::path& path, const MetSeries& met);
MetSeries read_met_csv(const std::filesystem::path& path);

}  // namespace uhinet::data
