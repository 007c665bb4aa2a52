#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glucoscope/domain/settings.hpp"
#include "glucoscope/domain/types.hpp"
#include "glucoscope/engine/predictor.hpp"

namespace glucoscope::service {

enum class AdviceSeverity { Info, Warning };

struct AdviceItem {
  AdviceSeverity severity = AdviceSeverity::Info;
  std::string code;  // PredictedHypo | PredictedHyper | FlagReminder | LowNow
  std::string message;
  Timestamp linked_time;

  bool operator==(const AdviceItem&) const = default;
};

inline constexpr std::chrono::hours kFlagReminderAfter{72};

// A stress or illness switch that is currently on (flag is the *On value).
struct ActiveFlag {
  HealthFlag flag = HealthFlag::StressOn;
  Timestamp since;
};

std::vector<ActiveFlag> active_flags(std::span<const DiaryEvent> events, Timestamp now);

struct AdviceInputs {
  Timestamp now;
  std::optional<GlucoseReading> latest;               // fresh reading, if any
  std::optional<engine::PredictionResult> prediction;  // no-candidate forecast
  std::vector<ActiveFlag> flags;
  PatientSettings settings;
};

// Fixed rule table, evaluated in this order:
//   LowNow          latest reading below alert_low                  (Warning)
//   PredictedHypo   forecast starts at/above alert_low, later below  (Warning)
//   PredictedHyper  forecast starts at/below alert_high, later above (Warning)
//   FlagReminder    stress/illness switch on for more than 72 h      (Info)
std::vector<AdviceItem> evaluate_advice(const AdviceInputs& inputs);

void to_json(nlohmann::json& j, const AdviceItem& item);

}  // namespace glucoscope::service
