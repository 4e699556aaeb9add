#pragma once

// Local weather typing: per-day synoptic features from the hourly met record,
// k-means clustering into weather types, and selection of the summer type
// used to build the training day list.

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "uhinet/datapipe/met.hpp"

namespace uhinet::lwt {

enum class Sector { N, E, S, W };

std::string_view sector_name(Sector s);

// Half-open, lower-inclusive quadrants centred on the compass points:
// [-45,45) N, [45,135) E, [135,225) S, [225,315) W. Input is reduced mod 360.
Sector classify_wind_direction(double degrees);

// Meteorological "blowing from" direction in [0, 360) for a flow (u east, v north).
double wind_direction_from(double u, double v);

struct DailyFeatures {
  data::Date date{};
  double amplitude = 0.0;      // degC, max - min of t2m
  double precipitation = 0.0;  // mm, daily total
  double humidity = 0.0;       // g/kg, daily mean
  double wind_speed = 0.0;     // m/s, speed of the daily-mean wind vector
  double wind_direction = 0.0; // degrees from
  Sector sector = Sector::N;

  bool operator==(const DailyFeatures&) const = default;
};

// Throws DataError when the day is not fully covered by the series.
DailyFeatures daily_metrics(const data::MetSeries& met, data::Date date);

// Features for every complete day of the series within [from, to].
std::vector<DailyFeatures> daily_metrics_range(const data::MetSeries& met, data::Date from, data::Date to);

inline constexpr std::size_t kContinuousFeatures = 4;
inline constexpr std::size_t kFeatureDims = kContinuousFeatures + 4;

struct Standardizer {
  std::array<double, kContinuousFeatures> mean{};
  std::array<double, kContinuousFeatures> sd{};

  static Standardizer fit(const std::vector<DailyFeatures>& features);
  // z-scored continuous features followed by the sector one-hot.
  std::array<double, kFeatureDims> transform(const DailyFeatures& f) const;
};

struct LwtAssignment {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<data::Date> dates;
  std::vector<int> labels;
  std::vector<std::array<double, kFeatureDims>> centroids;  // standardized space
  Standardizer standardizer;
  std::vector<double> wcss_trace;  // within-cluster sum of squares after each assignment step
  int iterations = 0;

  int label_of(data::Date d) const;  // -1 when the date was not clustered
  int nearest(const DailyFeatures& f) const;
};

// k-means with k-means++ seeding on standardized features; at most 300 Lloyd
// iterations, stopping once no centroid moves more than 1e-6.
LwtAssignment cluster_lwt(const std::vector<DailyFeatures>& features, int k, std::uint64_t seed);

bool is_summer(data::Date d);  // June to September

struct TargetLwtSelection {
  int cluster_id = 0;
  std::vector<data::Date> days;
  std::vector<double> scores;  // per cluster
  std::optional<int> override_id;
};

// Scores each cluster by (share of its baseline days in summer) x
// 1 / (1 + mean daily precipitation of its members, mm) and keeps the best
// unless `override_id` is given; then returns the summer days of `period`
// that belong to the chosen cluster (baseline label, else nearest centroid).
TargetLwtSelection select_target_lwt(const LwtAssignment& assignment, const std::vector<DailyFeatures>& baseline,
                                     const std::vector<DailyFeatures>& period, std::optional<int> override_id = {});

// lwt.json document and the selected day list read back from it.
nlohmann::json lwt_document(const LwtAssignment& assignment, const std::vector<DailyFeatures>& baseline,
                            const TargetLwtSelection& selection, const nlohmann::json& period);
std::vector<data::Date> selected_days(const nlohmann::json& lwt_doc);

}  // namespace uhinet::lwt
