#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "glucoscope/domain/time.hpp"

namespace glucoscope {

// Glucose values are mmol/L everywhere; mg/dL is a display concern.
inline constexpr double kMaxGlucose = 40.0;
inline constexpr double kMaxMealCarbs = 500.0;
inline constexpr double kMaxDoseUnits = 50.0;
inline constexpr double kDoseIncrement = 0.5;
inline constexpr double kMaxExerciseMinutes = 600.0;

struct GlucoseReading {
  Timestamp timestamp;
  double value = 0.0;

  bool operator==(const GlucoseReading&) const = default;
};

enum class EventKind { Meal, Exercise, InsulinDose, HealthFlag };
enum class MealCategory { Breakfast, Lunch, Meal, Snack };
enum class DoseSource { Recommended, Manual };
enum class HealthFlag { StressOn, StressOff, IllnessOn, IllnessOff };

struct MealEventPayload {
  double carbs = 0.0;
  double protein = 0.0;
  double fat = 0.0;
  double alcohol_units = 0.0;
  std::optional<std::string> meal_profile_id;
  MealCategory category = MealCategory::Meal;

  bool operator==(const MealEventPayload&) const = default;
};

struct ExerciseEventPayload {
  std::string exercise_type;
  int intensity = 1;      // 1..3
  double duration = 0.0;  // minutes

  bool operator==(const ExerciseEventPayload&) const = default;
};

struct InsulinDosePayload {
  double units = 0.0;
  DoseSource source = DoseSource::Manual;

  bool operator==(const InsulinDosePayload&) const = default;
};

struct HealthFlagPayload {
  HealthFlag flag = HealthFlag::StressOn;

  bool operator==(const HealthFlagPayload&) const = default;
};

// The variant index is the event kind, so a payload can never disagree with it.
using EventPayload =
    std::variant<MealEventPayload, ExerciseEventPayload, InsulinDosePayload, HealthFlagPayload>;

EventKind kind_of(const EventPayload& payload) noexcept;

struct DiaryEvent {
  std::string id;
  Timestamp timestamp;
  EventPayload payload;

  EventKind kind() const noexcept { return kind_of(payload); }

  template <typename Payload>
  const Payload* get_if() const noexcept {
    return std::get_if<Payload>(&payload);
  }

  bool operator==(const DiaryEvent&) const = default;
};

struct MealProfile {
  std::string id;
  std::string name;
  double carbs = 0.0;
  double protein = 0.0;
  double fat = 0.0;
  std::string image_ref;
  MealCategory category = MealCategory::Meal;
  Timestamp created_at;

  bool operator==(const MealProfile&) const = default;
};

std::string_view to_string(EventKind kind) noexcept;
std::string_view to_string(MealCategory category) noexcept;
std::string_view to_string(DoseSource source) noexcept;
std::string_view to_string(HealthFlag flag) noexcept;

// Inverse of to_string; throw Error(ParseError) on unknown names.
EventKind parse_event_kind(std::string_view name);
MealCategory parse_meal_category(std::string_view name);
DoseSource parse_dose_source(std::string_view name);
HealthFlag parse_health_flag(std::string_view name);

}  // namespace glucoscope
