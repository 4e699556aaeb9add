#include "uhinet/lwt/lwt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "uhinet/errors.hpp"
#include "uhinet/rng.hpp"

namespace uhinet::lwt {

namespace {

constexpr int kMaxIterations = 300;
constexpr double kTolerance = 1e-6;

using Point = std::array<double, kFeatureDims>;

double dist2(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < kFeatureDims; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

int nearest_of(const std::vector<Point>& centroids, const Point& p) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = dist2(centroids[c], p);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::array<double, kContinuousFeatures> continuous(const DailyFeatures& f) {
  return {f.amplitude, f.precipitation, f.humidity, f.wind_speed};
}

}  // namespace

std::string_view sector_name(Sector s) {
  switch (s) {
    case Sector::N: return "N";
    case Sector::E: return "E";
    case Sector::S: return "S";
    case Sector::W: return "W";
  }
  return "?";
}

Sector classify_wind_direction(double degrees) {
  if (!std::isfinite(degrees)) throw DataError("wind direction must be finite");
  double d = std::fmod(degrees, 360.0);
  if (d < 0.0) d += 360.0;
  if (d >= 315.0 || d < 45.0) return Sector::N;
  if (d < 135.0) return Sector::E;
  if (d < 225.0) return Sector::S;
  return Sector::W;
}

double wind_direction_from(double u, double v) {
  double deg = std::atan2(-u, -v) * 180.0 / std::numbers::pi;
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

DailyFeatures daily_metrics(const data::MetSeries& met, data::Date date) {
  std::vector<data::MetRecord> rows;
  try {
    rows = met.day(date);
  } catch (const DataError&) {
    throw DataError("daily metrics: missing hours for " + data::format_date(date));
  }
  DailyFeatures f;
  f.date = date;
  double tmin = std::numeric_limits<double>::infinity();
  double tmax = -std::numeric_limits<double>::infinity();
  double q = 0.0, u = 0.0, v = 0.0;
  for (const auto& r : rows) {
    tmin = std::min(tmin, r.t2m);
    tmax = std::max(tmax, r.t2m);
    f.precipitation += r.precip;
    q += r.q;
    u += r.u10;
    v += r.v10;
  }
  const double n = static_cast<double>(rows.size());
  f.amplitude = tmax - tmin;
  f.humidity = q / n;
  u /= n;
  v /= n;
  f.wind_speed = std::hypot(u, v);
  f.wind_direction = wind_direction_from(u, v);
  f.sector = classify_wind_direction(f.wind_direction);
  return f;
}

std::vector<DailyFeatures> daily_metrics_range(const data::MetSeries& met, data::Date from, data::Date to) {
  std::vector<DailyFeatures> out;
  for (data::Date d : met.dates()) {
    if (d >= from && d <= to) out.push_back(daily_metrics(met, d));
  }
  return out;
}

Standardizer Standardizer::fit(const std::vector<DailyFeatures>& features) {
  Standardizer s;
  const double n = static_cast<double>(features.size());
  for (const auto& f : features) {
    const auto c = continuous(f);
    for (std::size_t i = 0; i < kContinuousFeatures; ++i) s.mean[i] += c[i];
  }
  for (auto& m : s.mean) m /= n;
  for (const auto& f : features) {
    const auto c = continuous(f);
    for (std::size_t i = 0; i < kContinuousFeatures; ++i) s.sd[i] += (c[i] - s.mean[i]) * (c[i] - s.mean[i]);
  }
  for (auto& sd : s.sd) {
    sd = std::sqrt(sd / n);
    if (!(sd > 0.0)) sd = 1.0;  // constant feature: every z-score is 0
  }
  return s;
}

std::array<double, kFeatureDims> Standardizer::transform(const DailyFeatures& f) const {
  Point p{};
  const auto c = continuous(f);
  for (std::size_t i = 0; i < kContinuousFeatures; ++i) p[i] = (c[i] - mean[i]) / sd[i];
  p[kContinuousFeatures + static_cast<std::size_t>(f.sector)] = 1.0;
  return p;
}

int LwtAssignment::label_of(data::Date d) const {
  auto it = std::lower_bound(dates.begin(), dates.end(), d);
  return it != dates.end() && *it == d ? labels[static_cast<std::size_t>(it - dates.begin())] : -1;
}

int LwtAssignment::nearest(const DailyFeatures& f) const { return nearest_of(centroids, standardizer.transform(f)); }

LwtAssignment cluster_lwt(const std::vector<DailyFeatures>& features, int k, std::uint64_t seed) {
  if (k < 1 || static_cast<std::size_t>(k) > features.size()) {
    throw ParameterError("cluster_lwt: k=" + std::to_string(k) + " must be in [1, " + std::to_string(features.size()) +
                         "]");
  }
  for (std::size_t i = 1; i < features.size(); ++i) {
    if (features[i].date <= features[i - 1].date) throw DataError("cluster_lwt: features must be in date order");
  }
  LwtAssignment a;
  a.k = k;
  a.seed = seed;
  a.standardizer = Standardizer::fit(features);
  std::vector<Point> points;
  points.reserve(features.size());
  for (const auto& f : features) {
    points.push_back(a.standardizer.transform(f));
    a.dates.push_back(f.date);
  }
  const std::size_t n = points.size();

  // k-means++ seeding.
  Rng rng(derive_seed(seed, 0x4b6d));
  std::vector<Point> centroids;
  centroids.push_back(points[rng.index(n)]);
  std::vector<double> d2(n);
  while (centroids.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) d2[i] = std::min(d2[i], dist2(points[i], c));
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.index(n);
    }
    centroids.push_back(points[pick]);
  }

  std::vector<int> labels(n, 0);
  for (int it = 0; it < kMaxIterations; ++it) {
    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = nearest_of(centroids, points[i]);
      wcss += dist2(points[i], centroids[static_cast<std::size_t>(labels[i])]);
    }
    a.wcss_trace.push_back(wcss);
    a.iterations = it + 1;

    std::vector<Point> next(centroids.size(), Point{});
    std::vector<std::size_t> counts(centroids.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& c = next[static_cast<std::size_t>(labels[i])];
      for (std::size_t j = 0; j < kFeatureDims; ++j) c[j] += points[i][j];
      ++counts[static_cast<std::size_t>(labels[i])];
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      if (counts[c] == 0) {
        next[c] = centroids[c];  // an empty cluster keeps its centroid
      } else {
        for (auto& v : next[c]) v /= static_cast<double>(counts[c]);
      }
      shift = std::max(shift, std::sqrt(dist2(next[c], centroids[c])));
    }
    centroids = std::move(next);
    if (shift <= kTolerance) break;
  }
  // Final labels against the final centroids.
  for (std::size_t i = 0; i < n; ++i) labels[i] = nearest_of(centroids, points[i]);
  a.labels = std::move(labels);
  a.centroids = std::move(centroids);
  return a;
}

bool is_summer(data::Date d) {
  const unsigned m = data::month_of(d);
  return m >= 6 && m <= 9;
}

TargetLwtSelection select_target_lwt(const LwtAssignment& assignment, const std::vector<DailyFeatures>& baseline,
                                     const std::vector<DailyFeatures>& period, std::optional<int> override_id) {
  const auto k = static_cast<std::size_t>(assignment.k);
  std::vector<double> members(k, 0.0), summer(k, 0.0), precip(k, 0.0);
  for (const auto& f : baseline) {
    const int label = assignment.label_of(f.date);
    if (label < 0) throw DataError("select_target_lwt: baseline day " + data::format_date(f.date) + " not clustered");
    const auto c = static_cast<std::size_t>(label);
    members[c] += 1.0;
    precip[c] += f.precipitation;
    if (is_summer(f.date)) summer[c] += 1.0;
  }
  TargetLwtSelection sel;
  sel.override_id = override_id;
  sel.scores.assign(k, 0.0);
  bool any_summer = false;
  for (std::size_t c = 0; c < k; ++c) {
    if (members[c] == 0.0) continue;
    any_summer = any_summer || summer[c] > 0.0;
    sel.scores[c] = (summer[c] / members[c]) * (1.0 / (1.0 + precip[c] / members[c]));
  }
  if (override_id) {
    if (*override_id < 0 || *override_id >= assignment.k) {
      throw ParameterError("select_target_lwt: override cluster " + std::to_string(*override_id) + " out of range");
    }
    sel.cluster_id = *override_id;
  } else {
    if (!any_summer) throw SelectionError("select_target_lwt: no cluster has summer members");
    sel.cluster_id = static_cast<int>(std::max_element(sel.scores.begin(), sel.scores.end()) - sel.scores.begin());
  }
  for (const auto& f : period) {
    if (!is_summer(f.date)) continue;
    int label = assignment.label_of(f.date);
    if (label < 0) label = assignment.nearest(f);
    if (label == sel.cluster_id) sel.days.push_back(f.date);
  }
  return sel;
}

nlohmann::json lwt_document(const LwtAssignment& a, const std::vector<DailyFeatures>& baseline,
                            const TargetLwtSelection& sel, const nlohmann::json& period) {
  using nlohmann::json;
  const auto k = static_cast<std::size_t>(a.k);
  std::vector<std::array<double, kContinuousFeatures>> raw(k, std::array<double, kContinuousFeatures>{});
  std::vector<std::array<double, 4>> sectors(k, std::array<double, 4>{});
  std::vector<double> counts(k, 0.0);
  for (const auto& f : baseline) {
    const int label = a.label_of(f.date);
    if (label < 0) continue;
    const auto c = static_cast<std::size_t>(label);
    const auto v = continuous(f);
    for (std::size_t i = 0; i < kContinuousFeatures; ++i) raw[c][i] += v[i];
    sectors[c][static_cast<std::size_t>(f.sector)] += 1.0;
    counts[c] += 1.0;
  }
  json centroids = json::array();
  for (std::size_t c = 0; c < k; ++c) {
    const double n = std::max(counts[c], 1.0);
    json sector_share = json::object();
    for (Sector s : {Sector::N, Sector::E, Sector::S, Sector::W}) {
      sector_share[std::string(sector_name(s))] = sectors[c][static_cast<std::size_t>(s)] / n;
    }
    centroids.push_back({{"id", c},
                         {"members", counts[c]},
                         {"standardized", a.centroids[c]},
                         {"raw",
                          {{"amplitude_degC", raw[c][0] / n},
                           {"precipitation_mm", raw[c][1] / n},
                           {"humidity_gkg", raw[c][2] / n},
                           {"wind_speed_ms", raw[c][3] / n},
                           {"sector_share", sector_share}}}});
  }
  json assignments = json::array();
  for (std::size_t i = 0; i < a.dates.size(); ++i) {
    assignments.push_back({{"date", data::format_date(a.dates[i])}, {"cluster", a.labels[i]}});
  }
  json days = json::array();
  for (auto d : sel.days) days.push_back(data::format_date(d));
  return {{"k", a.k},
          {"seed", a.seed},
          {"iterations", a.iterations},
          {"standardization", {{"mean", a.standardizer.mean}, {"sd", a.standardizer.sd}}},
          {"centroids", centroids},
          {"assignments", assignments},
          {"selection",
           {{"cluster_id", sel.cluster_id},
            {"days", days},
            {"criteria",
             {{"score", "summer_share * 1/(1 + mean_precipitation_mm)"},
              {"scores", sel.scores},
              {"override", sel.override_id ? json(*sel.override_id) : json(nullptr)},
              {"summer_months", {6, 7, 8, 9}},
              {"period", period}}}}}};
}

std::vector<data::Date> selected_days(const nlohmann::json& doc) {
  std::vector<data::Date> out;
  try {
    for (const auto& d : doc.at("selection").at("days")) out.push_back(data::parse_date(d.get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("lwt document: ") + e.what());
  }
  if (out.empty()) throw SelectionError("lwt document selects no days");
  return out;
}

}  // namespace uhinet::lwt
