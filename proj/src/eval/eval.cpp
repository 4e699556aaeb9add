#include "uhinet/eval/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>

#include "json.hpp"
#include "uhinet/errors.hpp"

namespace uhinet::eval {

double pearson(std::span<const double> o, std::span<const double> p) {
  if (o.size() != p.size()) throw DimensionError("pearson: series lengths differ");
  if (o.size() < 2) throw DimensionError("pearson: need at least two pairs");
  const double n = static_cast<double>(o.size());
  double mo = 0.0, mp = 0.0;
  for (std::size_t i = 0; i < o.size(); ++i) {
    mo += o[i];
    mp += p[i];
  }
  mo /= n;
  mp /= n;
  double cov = 0.0, vo = 0.0, vp = 0.0;
  for (std::size_t i = 0; i < o.size(); ++i) {
    cov += (o[i] - mo) * (p[i] - mp);
    vo += (o[i] - mo) * (o[i] - mo);
    vp += (p[i] - mp) * (p[i] - mp);
  }
  if (!(vo > 0.0) || !(vp > 0.0)) throw NumericError("pearson: undefined for a constant series");
  return std::clamp(cov / std::sqrt(vo * vp), -1.0, 1.0);
}

MetricsRecord regression_metrics(std::span<const double> o, std::span<const double> p, double mape_epsilon) {
  if (o.size() != p.size()) throw DimensionError("metrics: series lengths differ");
  if (o.size() < 2) throw DimensionError("metrics: need at least two pairs");
  MetricsRecord r;
  r.n = o.size();
  double se = 0.0, ae = 0.0, ape = 0.0;
  std::size_t ape_terms = 0;
  for (std::size_t i = 0; i < o.size(); ++i) {
    const double e = o[i] - p[i];
    se += e * e;
    ae += std::abs(e);
    if (std::abs(o[i]) < mape_epsilon) {
      ++r.excluded_mape_terms;
    } else {
      ape += std::abs(e) / std::abs(o[i]);
      ++ape_terms;
    }
  }
  const double n = static_cast<double>(r.n);
  r.rmse = std::sqrt(se / n);
  r.mae = ae / n;
  if (ape_terms) r.mape = 100.0 * ape / static_cast<double>(ape_terms);
  try {
    r.pearson = pearson(o, p);
  } catch (const NumericError&) {
    r.pearson.reset();
  }
  return r;
}

namespace {

void read_series_csv(const std::filesystem::path& path, StationSpec& s) {
  const std::string text = data::read_file(path);
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != "timestamp,t_degC") throw DataError(path.string() + ": expected header 'timestamp,t_degC'");
      header = false;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) throw DataError(path.string() + ": malformed line");
    double v = 0.0;
    const auto num = line.substr(comma + 1);
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
    if (ec != std::errc{} || ptr != num.data() + num.size()) throw DataError(path.string() + ": bad value");
    const auto t = data::parse_timestamp(line.substr(0, comma));
    if (!s.real_times.empty() && t <= s.real_times.back()) {
      throw DataError(path.string() + ": timestamps not strictly increasing");
    }
    s.real_times.push_back(t);
    s.real_values.push_back(v);
  }
}

std::vector<double> real_series(const StationSpec& s, const std::vector<data::Date>& dates) {
  std::vector<double> out;
  for (data::Date d : dates) {
    for (int h = 0; h < 24; ++h) {
      const auto t = data::hour_stamp(d, h);
      auto it = std::lower_bound(s.real_times.begin(), s.real_times.end(), t);
      if (it == s.real_times.end() || *it != t) {
        throw DataError("station " + s.name + ": no measurement at " + data::format_timestamp(t));
      }
      out.push_back(s.real_values[static_cast<std::size_t>(it - s.real_times.begin())]);
    }
  }
  return out;
}

}  // namespace

std::vector<StationSpec> read_stations(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(data::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw ConfigError(path.string() + ": expected an array of stations");
  std::vector<StationSpec> out;
  for (const auto& e : j) {
    StationSpec s;
    try {
      for (const auto& [key, value] : e.items()) {
        if (key != "name" && key != "x" && key != "y" && key != "series_file") {
          throw ConfigError(path.string() + ": unknown station key '" + key + "'");
        }
      }
      s.name = e.at("name").get<std::string>();
      for (const char* axis : {"x", "y"}) {
        if (!e.at(axis).is_number_unsigned()) {
          throw ConfigError(path.string() + ": station '" + s.name + "' " + axis + " must be a non-negative integer");
        }
      }
      s.x = e.at("x").get<std::size_t>();
      s.y = e.at("y").get<std::size_t>();
      if (e.contains("series_file") && !e.at("series_file").is_null()) {
        s.series_file = path.parent_path() / e.at("series_file").get<std::string>();
      }
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError(path.string() + ": " + ex.what());
    }
    if (s.series_file) read_series_csv(*s.series_file, s);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<double> extract_station_series(const data::GridStack& stack, const StationSpec& station) {
  stack.validate();
  if (station.x >= stack.width() || station.y >= stack.height()) {
    throw ConfigError("station " + station.name + " at (" + std::to_string(station.x) + "," +
                      std::to_string(station.y) + ") is outside the grid");
  }
  std::vector<double> out;
  out.reserve(stack.grids.size() * 24);
  for (std::size_t d = 0; d < stack.grids.size(); ++d) {
    for (const auto& g : stack.grids[d]) {
      if (g.is_nodata(station.x, station.y)) {
        throw DataError("station " + station.name + ": no data at its pixel on " + data::format_date(stack.dates[d]));
      }
      out.push_back(g.at(station.x, station.y));
    }
  }
  return out;
}

std::vector<data::RasterGrid> hourly_aggregate(const data::GridStack& stack) {
  stack.validate();
  std::vector<data::RasterGrid> out;
  const std::size_t n = stack.width() * stack.height();
  for (std::size_t h = 0; h < 24; ++h) {
    data::RasterGrid g = stack.grids[0][h];
    g.nodata.clear();
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& day : stack.grids) {
        if (!day[h].nodata.empty() && day[h].nodata[i]) continue;
        sum += day[h].values[i];
        ++count;
      }
      if (count) {
        g.values[i] = static_cast<float>(sum / static_cast<double>(count));
      } else {
        g.values[i] = 0.0F;
        g.set_nodata(i % g.width, i / g.width);
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<ReportRow> station_report(const std::vector<StationSpec>& stations, const data::GridStack& a,
                                      const data::GridStack& b, double mape_epsilon) {
  if (a.dates != b.dates) throw DataError("station report: the two stacks cover different days");
  std::vector<const StationSpec*> order;
  for (const auto& s : stations) order.push_back(&s);
  std::stable_sort(order.begin(), order.end(), [](const StationSpec* x, const StationSpec* y) { return x->name < y->name; });
  std::vector<ReportRow> rows;
  for (const StationSpec* s : order) {
    const auto sa = extract_station_series(a, *s);
    const auto sb = extract_station_series(b, *s);
    rows.push_back({s->name, "A-vs-B", regression_metrics(sb, sa, mape_epsilon)});
    if (s->series_file) {
      const auto real = real_series(*s, a.dates);
      rows.push_back({s->name, "A-vs-real", regression_metrics(real, sa, mape_epsilon)});
      rows.push_back({s->name, "B-vs-real", regression_metrics(real, sb, mape_epsilon)});
    }
  }
  return rows;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out = "station,comparison,pearson,rmse,mae,mape,n,excluded_mape_terms\n";
  char buf[64];
  auto num = [&](std::optional<double> v) -> std::string {
    if (!v) return "NA";
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
  };
  for (const auto& r : rows) {
    out += r.station + "," + r.comparison + "," + num(r.metrics.pearson) + "," + num(r.metrics.rmse) + "," +
           num(r.metrics.mae) + "," + num(r.metrics.mape) + "," + std::to_string(r.metrics.n) + "," +
           std::to_string(r.metrics.excluded_mape_terms) + "\n";
  }
  return out;
}

}  // namespace uhinet::eval
