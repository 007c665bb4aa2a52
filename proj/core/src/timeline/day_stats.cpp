#include "glucoscope/timeline/day_stats.hpp"

#include <cmath>
#include <cstdint>

namespace glucoscope::timeline {

std::array<double, 3> DayStats::percentages() const {
  const std::uint64_t n = total();
  if (n == 0) return {0.0, 0.0, 0.0};
  constexpr int kFractionBits = 20;
  constexpr std::uint64_t kScale = std::uint64_t{100} << kFractionBits;
  const std::array<std::uint64_t, 3> counts{low_count, in_count, high_count};
  std::array<std::uint64_t, 3> units{}, remainder{};
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    units[i] = counts[i] * kScale / n;
    remainder[i] = counts[i] * kScale % n;
    assigned += units[i];
  }
  // At most two units short; hand them to the largest remainders.
  for (; assigned < kScale; ++assigned) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < 3; ++i) {
      if (remainder[i] > remainder[best]) best = i;
    }
    ++units[best];
    remainder[best] = 0;
  }
  std::array<double, 3> pct{};
  for (std::size_t i = 0; i < 3; ++i) {
    pct[i] = std::ldexp(static_cast<double>(units[i]), -kFractionBits);
  }
  return pct;
}

GlycemicBand classify(double glucose, const GlycemicThresholds& thresholds) {
  if (glucose < thresholds.hypo) return GlycemicBand::Low;
  if (glucose > thresholds.hyper) return GlycemicBand::High;
  return GlycemicBand::InRange;
}

DayStats day_stats(Date date, std::span<const GlucoseReading> readings,
                   const GlycemicThresholds& thresholds) {
  DayStats stats;
  stats.date = date;
  const TimeRange range = day_range(date);
  for (const auto& r : readings) {
    if (!range.contains(r.timestamp)) continue;
    switch (classify(r.value, thresholds)) {
      case GlycemicBand::Low: ++stats.low_count; break;
      case GlycemicBand::InRange: ++stats.in_count; break;
      case GlycemicBand::High: ++stats.high_count; break;
    }
  }
  return stats;
}

std::optional<Timestamp> last_consumed(std::string_view meal_profile_id,
                                       std::span<const DiaryEvent> log, Timestamp before) {
  std::optional<Timestamp> last;
  for (const auto& event : log) {
    if (event.timestamp >= before) continue;
    const auto* meal = event.get_if<MealEventPayload>();
    if (meal && meal->meal_profile_id == meal_profile_id &&
        (!last || event.timestamp > *last)) {
      last = event.timestamp;
    }
  }
  return last;
}

std::vector<DayIcon> day_icons(Date date, std::span<const DiaryEvent> log,
                               const IconEncoder& encoder) {
  std::vector<DayIcon> icons;
  const TimeRange range = day_range(date);
  for (const auto& event : log) {
    if (!range.contains(event.timestamp)) continue;
    DayIcon icon{event.id, event.kind(), event.timestamp, std::nullopt, std::nullopt};
    if (encoder) icon.value = encoder(event);
    if (const auto* meal = event.get_if<MealEventPayload>(); meal && meal->meal_profile_id) {
      icon.last_consumed = last_consumed(*meal->meal_profile_id, log, event.timestamp);
    }
    icons.push_back(std::move(icon));
  }
  return icons;
}

DayStats summarize_day(Date date, std::span<const GlucoseReading> readings,
                       std::span<const DiaryEvent> log, const GlycemicThresholds& thresholds,
                       const IconEncoder& encoder) {
  DayStats stats = day_stats(date, readings, thresholds);
  stats.icons = day_icons(date, log, encoder);
  return stats;
}

}  // namespace glucoscope::timeline
