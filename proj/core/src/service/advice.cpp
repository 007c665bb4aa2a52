#include "glucoscope/service/advice.hpp"

#include <cstdio>

namespace glucoscope::service {
namespace {

std::string format_mmol(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::optional<std::size_t> first_index(const std::vector<double>& points, auto predicate) {
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (predicate(points[k])) return k;
  }
  return std::nullopt;
}

}  // namespace

std::vector<ActiveFlag> active_flags(std::span<const DiaryEvent> events, Timestamp now) {
  std::optional<Timestamp> stress;
  std::optional<Timestamp> illness;
  for (const auto& event : events) {
    if (event.timestamp > now) break;
    const auto* f = event.get_if<HealthFlagPayload>();
    if (!f) continue;
    switch (f->flag) {
      case HealthFlag::StressOn: stress = event.timestamp; break;
      case HealthFlag::StressOff: stress.reset(); break;
      case HealthFlag::IllnessOn: illness = event.timestamp; break;
      case HealthFlag::IllnessOff: illness.reset(); break;
    }
  }
  std::vector<ActiveFlag> out;
  if (stress) out.push_back({HealthFlag::StressOn, *stress});
  if (illness) out.push_back({HealthFlag::IllnessOn, *illness});
  return out;
}

std::vector<AdviceItem> evaluate_advice(const AdviceInputs& in) {
  std::vector<AdviceItem> items;
  const auto& s = in.settings;

  if (in.latest && in.latest->value < s.alert_low) {
    items.push_back({AdviceSeverity::Warning, "LowNow",
                     "Glucose is " + format_mmol(in.latest->value) + " mmol/L, below " +
                         format_mmol(s.alert_low) + ". Treat the low now.",
                     in.latest->timestamp});
  }

  if (in.prediction && !in.prediction->points.empty()) {
    const auto& p = *in.prediction;
    if (p.points.front() >= s.alert_low) {
      if (auto k = first_index(p.points, [&](double g) { return g < s.alert_low; })) {
        items.push_back({AdviceSeverity::Warning, "PredictedHypo",
                         "Glucose is predicted to fall below " + format_mmol(s.alert_low) +
                             " mmol/L within " + std::to_string(*k * p.step) + " minutes.",
                         p.time_at(*k)});
      }
    }
    if (p.points.front() <= s.alert_high) {
      if (auto k = first_index(p.points, [&](double g) { return g > s.alert_high; })) {
        items.push_back({AdviceSeverity::Warning, "PredictedHyper",
                         "Glucose is predicted to rise above " + format_mmol(s.alert_high) +
                             " mmol/L within " + std::to_string(*k * p.step) + " minutes.",
                         p.time_at(*k)});
      }
    }
  }

  for (const auto& flag : in.flags) {
    if (in.now - flag.since > kFlagReminderAfter) {
      const bool stress = flag.flag == HealthFlag::StressOn;
      items.push_back({AdviceSeverity::Info, "FlagReminder",
                       std::string(stress ? "Stress" : "Illness") +
                           " switch has been on for more than 72 hours.",
                       flag.since});
    }
  }
  return items;
}

void to_json(nlohmann::json& j, const AdviceItem& item) {
  j = nlohmann::json{{"severity", item.severity == AdviceSeverity::Warning ? "warning" : "info"},
                     {"code", item.code},
                     {"message", item.message},
                     {"linked_time", format_timestamp(item.linked_time)}};
}

}  // namespace glucoscope::service
