#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include <nlohmann/json.hpp>

#include "glucoscope/domain/settings.hpp"
#include "glucoscope/domain/types.hpp"

namespace glucoscope::store {

enum class Period { Day, Week, Month };

std::string_view to_string(Period period) noexcept;
Period parse_period(std::string_view name);  // "day" | "week" | "month"

// Trailing window of 1, 7 or 30 days that ends with (and includes) `at`.
TimeRange period_range(Period period, Date at);

struct PeriodStatistics {
  Period period = Period::Day;
  TimeRange range;
  double total_insulin = 0.0;      // U
  double pct_time_in_range = 0.0;  // 0 when there are no readings
  std::size_t hypo_count = 0;
  double exercise_minutes = 0.0;
  std::size_t reading_count = 0;
};

// Readings below the hypo threshold start an episode when the counter is
// armed. It starts armed and re-arms after three consecutive readings at or
// above the threshold (15 min at CGM cadence), so one dip counts once.
std::size_t count_hypo_episodes(std::span<const GlucoseReading> readings, double hypo_threshold);

PeriodStatistics period_statistics(Period period, Date at, std::span<const DiaryEvent> events,
                                   std::span<const GlucoseReading> readings,
                                   const GlycemicThresholds& thresholds);

void to_json(nlohmann::json& j, const PeriodStatistics& s);

}  // namespace glucoscope::store
