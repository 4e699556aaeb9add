#include "uhinet/datapipe/met.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "uhinet/datapipe/raster.hpp"
#include "uhinet/errors.hpp"

namespace uhinet::data {

namespace {
constexpr std::string_view kHeader = "timestamp,t2m_degC,precip_mmph,q_gkg,u10_ms,v10_ms";

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DataError("met CSV line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}
}  // namespace

const std::array<const char*, kMetVars>& met_variable_names() {
  static const std::array<const char*, kMetVars> names = {"t2m", "precip", "q", "u10", "v10"};
  return names;
}

MetSeries::MetSeries(std::vector<MetRecord> rows) : rows_(std::move(rows)) {
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    if (rows_[i].time <= rows_[i - 1].time) {
      throw DataError("met series: timestamps not strictly increasing at " + format_timestamp(rows_[i].time));
    }
  }
  std::size_t i = 0;
  while (i < rows_.size()) {
    const Date d = stamp_date(rows_[i].time);
    std::size_t j = i;
    while (j < rows_.size() && stamp_date(rows_[j].time) == d) ++j;
    if (j - i != 24) {
      throw DataError("met series: day " + format_date(d) + " has " + std::to_string(j - i) + " of 24 hours");
    }
    i = j;
  }
}

const MetRecord* MetSeries::find(HourStamp t) const {
  auto it = std::lower_bound(rows_.begin(), rows_.end(), t, [](const MetRecord& r, HourStamp v) { return r.time < v; });
  return it != rows_.end() && it->time == t ? &*it : nullptr;
}

const MetRecord& MetSeries::at(HourStamp t) const {
  const MetRecord* r = find(t);
  if (!r) throw DataError("met series: no record for " + format_timestamp(t));
  return *r;
}

std::vector<MetRecord> MetSeries::day(Date d) const {
  const MetRecord* first = find(hour_stamp(d, 0));
  if (!first) throw DataError("met series: no records for " + format_date(d));
  return {first, first + 24};
}

std::vector<Date> MetSeries::dates() const {
  std::vector<Date> out;
  for (std::size_t i = 0; i < rows_.size(); i += 24) out.push_back(stamp_date(rows_[i].time));
  return out;
}

std::string encode_met_csv(const MetSeries& met) {
  std::string out(kHeader);
  out.push_back('\n');
  char buf[160];
  for (const auto& r : met.rows()) {
    // 17 significant digits round-trip doubles exactly.
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t2m, r.precip, r.q, r.u10, r.v10);
    out += format_timestamp(r.time);
    out += buf;
  }
  return out;
}

MetSeries decode_met_csv(std::string_view text) {
  std::vector<MetRecord> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kHeader) throw DataError("met CSV: expected header '" + std::string(kHeader) + "'");
      header_seen = true;
      continue;
    }
    std::array<std::string_view, 6> fields;
    std::size_t f = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        if (f == fields.size()) throw DataError("met CSV line " + std::to_string(line_no) + ": too many fields");
        fields[f++] = line.substr(start, i - start);
        start = i + 1;
      }
    }
    if (f != fields.size()) throw DataError("met CSV line " + std::to_string(line_no) + ": expected 6 fields");
    MetRecord r;
    r.time = parse_timestamp(fields[0]);
    r.t2m = parse_double(fields[1], line_no);
    r.precip = parse_double(fields[2], line_no);
    r.q = parse_double(fields[3], line_no);
    r.u10 = parse_double(fields[4], line_no);
    r.v10 = parse_double(fields[5], line_no);
    rows.push_back(r);
  }
  if (!header_seen) throw DataError("met CSV: empty file");
  return MetSeries(std::move(rows));
}

void write_met_csv(const std::filesystem::path& path, const MetSeries& met) { write_file(path, encode_met_csv(met)); }

MetSeries read_met_csv(const std::filesystem::path& path) {
  try {
    return decode_met_csv(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace uhinet::data
