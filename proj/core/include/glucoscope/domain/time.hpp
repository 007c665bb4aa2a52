#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace glucoscope {

// Absolute time at one-second resolution. All times are UTC.
using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

struct TimeRange {
  Timestamp start;
  Timestamp end;  // exclusive

  bool contains(Timestamp t) const noexcept { return start <= t && t < end; }
};

// RFC 3339, always emitted as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(Timestamp t);
// Accepts "Z" or a numeric offset; fractional seconds are truncated.
Timestamp parse_timestamp(std::string_view text);

std::string format_date(Date d);
Date parse_date(std::string_view text);

inline Date day_of(Timestamp t) { return std::chrono::floor<std::chrono::days>(t); }

inline std::chrono::minutes time_of_day(Timestamp t) {
  return std::chrono::floor<std::chrono::minutes>(t - day_of(t));
}

inline double minutes_between(Timestamp from, Timestamp to) {
  return static_cast<double>((to - from).count()) / 60.0;
}

inline TimeRange day_range(Date d) {
  return {Timestamp{d}, Timestamp{d + std::chrono::days{1}}};
}

Timestamp now_utc();

}  // namespace glucoscope
