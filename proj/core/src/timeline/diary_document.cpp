#include "glucoscope/timeline/diary_document.hpp"

#include "glucoscope/domain/serialization.hpp"

namespace glucoscope::timeline {
namespace {

using nlohmann::json;

json optional_time(const std::optional<Timestamp>& t) {
  return t ? json(format_timestamp(*t)) : json(nullptr);
}

template <typename T>
json optional_value(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string_view kind_name(SegmentKind kind) {
  return kind == SegmentKind::Focus ? "focus" : "context";
}

}  // namespace

FocalDayDetail focal_day_detail(Date date, std::span<const GlucoseReading> readings,
                                std::span<const DiaryEvent> events,
                                std::span<const MealProfile> meal_library,
                                std::optional<engine::PredictionResult> prediction) {
  FocalDayDetail detail;
  detail.date = date;
  detail.prediction = std::move(prediction);
  const TimeRange range = day_range(date);
  for (const auto& r : readings) {
    if (range.contains(r.timestamp)) detail.glucose_series.push_back(r);
  }
  for (const auto& event : events) {
    if (!range.contains(event.timestamp)) continue;
    if (const auto* dose = event.get_if<InsulinDosePayload>()) {
      detail.dose_markers.push_back({event.id, event.timestamp, dose->units});
    } else if (const auto* meal = event.get_if<MealEventPayload>()) {
      MealOverlayItem item{event.id, event.timestamp, meal->carbs, meal->meal_profile_id,
                           std::nullopt};
      if (meal->meal_profile_id) {
        for (const auto& profile : meal_library) {
          if (profile.id == *meal->meal_profile_id && !profile.image_ref.empty()) {
            item.image_ref = profile.image_ref;
            break;
          }
        }
      }
      detail.overlay.push_back(std::move(item));
    }
  }
  return detail;
}

void to_json(json& j, const DayStats& s) {
  json icons = json::array();
  for (const auto& icon : s.icons) {
    icons.push_back({{"event_id", icon.event_id},
                     {"kind", to_string(icon.kind)},
                     {"time", format_timestamp(icon.time)},
                     {"value", optional_value(icon.value)},
                     {"last_consumed", optional_time(icon.last_consumed)}});
  }
  j = json{{"date", format_date(s.date)},
           {"has_data", s.has_data()},
           {"pct_low", s.pct_low()},
           {"pct_in", s.pct_in()},
           {"pct_high", s.pct_high()},
           {"low_count", s.low_count},
           {"in_count", s.in_count},
           {"high_count", s.high_count},
           {"icons", std::move(icons)}};
}

void to_json(json& j, const FocalDayDetail& d) {
  json doses = json::array();
  for (const auto& m : d.dose_markers) {
    doses.push_back(
        {{"event_id", m.event_id}, {"time", format_timestamp(m.time)}, {"units", m.units}});
  }
  json overlay = json::array();
  for (const auto& o : d.overlay) {
    overlay.push_back({{"event_id", o.event_id},
                       {"time", format_timestamp(o.time)},
                       {"carbs", o.carbs},
                       {"meal_profile_id", optional_value(o.meal_profile_id)},
                       {"image_ref", optional_value(o.image_ref)}});
  }
  j = json{{"date", format_date(d.date)},
           {"glucose_series", d.glucose_series},
           {"prediction", d.prediction ? json(*d.prediction) : json(nullptr)},
           {"dose_markers", std::move(doses)},
           {"overlay", std::move(overlay)}};
}

json diary_geometry(const BifocalLayout& layout, std::span<const GlucoseReading> readings,
                    std::span<const DiaryEvent> events, const GlycemicThresholds& thresholds,
                    const IconEncoder& encoder) {
  json segments = json::array();
  json stat_bars = json::array();
  json icons = json::array();
  for (const auto& seg : layout.segments()) {
    segments.push_back({{"day", format_date(seg.day)},
                        {"x_start", seg.x_start},
                        {"x_end", seg.x_end},
                        {"kind", kind_name(seg.kind)}});
    DayStats stats = summarize_day(seg.day, readings, events, thresholds, encoder);
    for (const auto& icon : stats.icons) {
      icons.push_back({{"x", layout.time_to_x(icon.time)},
                       {"day", format_date(seg.day)},
                       {"event_id", icon.event_id},
                       {"kind", to_string(icon.kind)},
                       {"value", optional_value(icon.value)},
                       {"last_consumed", optional_time(icon.last_consumed)}});
    }
    stats.icons.clear();
    json bar = stats;
    bar.erase("icons");
    stat_bars.push_back(std::move(bar));
  }

  json polyline = json::array();
  for (const auto& r : readings) {
    if (layout.visible(r.timestamp)) polyline.push_back({layout.time_to_x(r.timestamp), r.value});
  }
  json doses = json::array();
  for (const auto& event : events) {
    const auto* dose = event.get_if<InsulinDosePayload>();
    if (!dose || !layout.visible(event.timestamp)) continue;
    doses.push_back({{"x", layout.time_to_x(event.timestamp)},
                     {"time", format_timestamp(event.timestamp)},
                     {"units", dose->units},
                     {"event_id", event.id}});
  }

  return json{{"focal_day", format_date(layout.focal_day())},
              {"span_start", format_timestamp(layout.span_start())},
              {"span_end", format_timestamp(layout.span_end())},
              {"width", layout.config().width},
              {"segments", std::move(segments)},
              {"polyline", std::move(polyline)},
              {"dose_markers", std::move(doses)},
              {"stat_bars", std::move(stat_bars)},
              {"icons", std::move(icons)}};
}

}  // namespace glucoscope::timeline
