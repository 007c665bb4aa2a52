#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "glucoscope/domain/settings.hpp"
#include "glucoscope/domain/types.hpp"

namespace glucoscope::timeline {

enum class GlycemicBand { Low, InRange, High };

// Low is strictly below hypo, high strictly above hyper; both bounds are in range.
GlycemicBand classify(double glucose, const GlycemicThresholds& thresholds);

struct DayIcon {
  std::string event_id;
  EventKind kind = EventKind::Meal;
  Timestamp time;
  std::optional<double> value;  // vertical encoding in [0, 1], caller-defined
  std::optional<Timestamp> last_consumed;  // meals from a saved profile only
};

// Band counts are exact. Percentages are apportioned in steps of 2^-20 by
// largest remainder, so each is exactly representable and the three add up to
// exactly 100 in floating point, whatever the summation order.
struct DayStats {
  Date date;
  std::size_t low_count = 0;
  std::size_t in_count = 0;
  std::size_t high_count = 0;
  std::vector<DayIcon> icons;

  std::size_t total() const { return low_count + in_count + high_count; }
  bool has_data() const { return total() > 0; }
  double pct_low() const { return percentages()[0]; }
  double pct_in() const { return percentages()[1]; }
  double pct_high() const { return percentages()[2]; }
  // {low, in, high}; all zero without data.
  std::array<double, 3> percentages() const;
};

// Counts the readings that fall on `date`; other readings are ignored.
DayStats day_stats(Date date, std::span<const GlucoseReading> readings,
                   const GlycemicThresholds& thresholds);

using IconEncoder = std::function<std::optional<double>(const DiaryEvent&)>;

// One icon per event on `date`. Meals that reference a saved profile carry the
// previous time that profile was eaten.
std::vector<DayIcon> day_icons(Date date, std::span<const DiaryEvent> log,
                               const IconEncoder& encoder = {});

DayStats summarize_day(Date date, std::span<const GlucoseReading> readings,
                       std::span<const DiaryEvent> log, const GlycemicThresholds& thresholds,
                       const IconEncoder& encoder = {});

// Most recent meal referencing the profile strictly before `before`.
std::optional<Timestamp> last_consumed(std::string_view meal_profile_id,
                                       std::span<const DiaryEvent> log, Timestamp before);

}  // namespace glucoscope::timeline
