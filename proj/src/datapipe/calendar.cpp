#include "uhinet/datapipe/calendar.hpp"

#include <charconv>
#include <cstdio>

#include "uhinet/errors.hpp"

namespace uhinet::data {
namespace {

int parse_int(std::string_view s, std::size_t pos, std::size_t len, std::string_view whole) {
  int v = 0;
  if (pos + len > s.size()) throw DataError("bad date/time '" + std::string(whole) + "'");
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
  if (ec != std::errc{} || ptr != s.data() + pos + len) throw DataError("bad date/time '" + std::string(whole) + "'");
  return v;
}

}  // namespace

Date parse_date(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') throw DataError("bad date '" + std::string(iso) + "'");
  const std::chrono::year_month_day ymd{std::chrono::year{parse_int(iso, 0, 4, iso)},
                                        std::chrono::month{static_cast<unsigned>(parse_int(iso, 5, 2, iso))},
                                        std::chrono::day{static_cast<unsigned>(parse_int(iso, 8, 2, iso))}};
  if (!ymd.ok()) throw DataError("invalid calendar date '" + std::string(iso) + "'");
  return Date{ymd};
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

HourStamp hour_stamp(Date d, int hour) {
  return static_cast<HourStamp>(d.time_since_epoch().count()) * 24 + hour;
}

Date stamp_date(HourStamp h) {
  const auto day = h >= 0 ? h / 24 : (h - 23) / 24;
  return Date{std::chrono::days{day}};
}

int stamp_hour(HourStamp h) { return static_cast<int>(((h % 24) + 24) % 24); }

HourStamp parse_timestamp(std::string_view iso) {
  std::string_view s = iso;
  if (!s.empty() && s.back() == 'Z') s.remove_suffix(1);
  if (s.size() != 19 || s[10] != 'T' || s[13] != ':' || s[16] != ':') {
    throw DataError("bad timestamp '" + std::string(iso) + "'");
  }
  const Date d = parse_date(s.substr(0, 10));
  const int hour = parse_int(s, 11, 2, iso);
  const int minute = parse_int(s, 14, 2, iso);
  const int second = parse_int(s, 17, 2, iso);
  if (hour > 23 || minute != 0 || second != 0) throw DataError("timestamp not on the hour '" + std::string(iso) + "'");
  return hour_stamp(d, hour);
}

std::string format_timestamp(HourStamp h) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "T%02d", stamp_hour(h));
  return format_date(stamp_date(h)) + buf + ":00:00";
}

unsigned month_of(Date d) { return static_cast<unsigned>(std::chrono::year_month_day{d}.month()); }

int day_of_year(Date d) {
  const std::chrono::year_month_day ymd{d};
  const Date jan1{ymd.year() / std::chrono::January / 1};
  return static_cast<int>((d - jan1).count()) + 1;
}

}  // namespace uhinet::data
