#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace uhinet::data {

using Date = std::chrono::sys_days;

// Hours since 1970-01-01T00:00 (UTC); the time key of every hourly series.
using HourStamp = std::int64_t;

Date parse_date(std::string_view iso);  // "YYYY-MM-DD"
std::string format_date(Date d);

HourStamp hour_stamp(Date d, int hour);
Date stamp_date(HourStamp h);
int stamp_hour(HourStamp h);

// "YYYY-MM-DDTHH:MM:SS" (a trailing 'Z' is accepted); minutes/seconds must be zero.
HourStamp parse_timestamp(std::string_view iso);
std::string format_timestamp(HourStamp h);

unsigned month_of(Date d);
int day_of_year(Date d);  // 1-based

}  // namespace uhinet::data
