#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glucoscope/domain/settings.hpp"
#include "glucoscope/domain/types.hpp"
#include "glucoscope/engine/predictor.hpp"
#include "glucoscope/timeline/bifocal.hpp"
#include "glucoscope/timeline/day_stats.hpp"

namespace glucoscope::timeline {

struct DoseMarker {
  std::string event_id;
  Timestamp time;
  double units = 0.0;
};

struct MealOverlayItem {
  std::string event_id;
  Timestamp time;
  double carbs = 0.0;
  std::optional<std::string> meal_profile_id;
  std::optional<std::string> image_ref;  // from the meal library, when known
};

struct FocalDayDetail {
  Date date;
  std::vector<GlucoseReading> glucose_series;
  std::optional<engine::PredictionResult> prediction;  // today only
  std::vector<DoseMarker> dose_markers;
  std::vector<MealOverlayItem> overlay;
};

// The overlay holds exactly the meals logged on `date`, dose markers exactly
// the doses.
FocalDayDetail focal_day_detail(Date date, std::span<const GlucoseReading> readings,
                                std::span<const DiaryEvent> events,
                                std::span<const MealProfile> meal_library,
                                std::optional<engine::PredictionResult> prediction = {});

void to_json(nlohmann::json& j, const DayStats& stats);
void to_json(nlohmann::json& j, const FocalDayDetail& detail);

// Geometry document for the diary view: segments with x ranges, the glucose
// polyline as (x, mmol/L) pairs, dose markers, per-day stat bars and icons.
// Only data inside the visible span is emitted.
nlohmann::json diary_geometry(const BifocalLayout& layout,
                              std::span<const GlucoseReading> readings,
                              std::span<const DiaryEvent> events,
                              const GlycemicThresholds& thresholds,
                              const IconEncoder& encoder = {});

}  // namespace glucoscope::timeline
