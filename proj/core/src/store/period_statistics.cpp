#include "glucoscope/store/period_statistics.hpp"

#include <vector>

#include "glucoscope/domain/error.hpp"
#include "glucoscope/timeline/day_stats.hpp"

namespace glucoscope::store {
namespace {

constexpr std::size_t kRearmReadings = 3;

}  // namespace

std::string_view to_string(Period period) noexcept {
  switch (period) {
    case Period::Day: return "day";
    case Period::Week: return "week";
    case Period::Month: return "month";
  }
  return "unknown";
}

Period parse_period(std::string_view name) {
  if (name == "day") return Period::Day;
  if (name == "week") return Period::Week;
  if (name == "month") return Period::Month;
  throw Error(ErrorCode::ParseError, "unknown period '" + std::string(name) + "'");
}

TimeRange period_range(Period period, Date at) {
  int days = 1;
  switch (period) {
    case Period::Day: days = 1; break;
    case Period::Week: days = 7; break;
    case Period::Month: days = 30; break;
  }
  const Date end = at + std::chrono::days{1};
  return {Timestamp{end - std::chrono::days{days}}, Timestamp{end}};
}

std::size_t count_hypo_episodes(std::span<const GlucoseReading> readings, double hypo_threshold) {
  std::size_t episodes = 0;
  bool armed = true;
  std::size_t above_run = 0;
  for (const auto& r : readings) {
    if (r.value < hypo_threshold) {
      if (armed) {
        ++episodes;
        armed = false;
      }
      above_run = 0;
    } else if (++above_run >= kRearmReadings) {
      armed = true;
    }
  }
  return episodes;
}

PeriodStatistics period_statistics(Period period, Date at, std::span<const DiaryEvent> events,
                                   std::span<const GlucoseReading> readings,
                                   const GlycemicThresholds& thresholds) {
  PeriodStatistics s;
  s.period = period;
  s.range = period_range(period, at);
  for (const auto& event : events) {
    if (!s.range.contains(event.timestamp)) continue;
    if (const auto* dose = event.get_if<InsulinDosePayload>()) {
      s.total_insulin += dose->units;
    } else if (const auto* ex = event.get_if<ExerciseEventPayload>()) {
      s.exercise_minutes += ex->duration;
    }
  }
  std::vector<GlucoseReading> window;
  std::size_t in_range = 0;
  for (const auto& r : readings) {
    if (!s.range.contains(r.timestamp)) continue;
    window.push_back(r);
    if (timeline::classify(r.value, thresholds) == timeline::GlycemicBand::InRange) ++in_range;
  }
  s.reading_count = window.size();
  if (!window.empty()) {
    s.pct_time_in_range =
        static_cast<double>(in_range) * 100.0 / static_cast<double>(window.size());
  }
  s.hypo_count = count_hypo_episodes(window, thresholds.hypo);
  return s;
}

void to_json(nlohmann::json& j, const PeriodStatistics& s) {
  j = nlohmann::json{{"period", to_string(s.period)},
                     {"from", format_timestamp(s.range.start)},
                     {"to", format_timestamp(s.range.end)},
                     {"total_insulin", s.total_insulin},
                     {"pct_time_in_range", s.pct_time_in_range},
                     {"hypo_count", s.hypo_count},
                     {"exercise_minutes", s.exercise_minutes},
                     {"reading_count", s.reading_count}};
}

}  // namespace glucoscope::store
