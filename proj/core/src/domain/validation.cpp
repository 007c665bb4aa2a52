#include "glucoscope/domain/validation.hpp"

#include <cmath>
#include <type_traits>

#include "glucoscope/domain/error.hpp"

namespace glucoscope {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvariantViolation, what);
}

void require_nonnegative(double value, const char* field) {
  require(std::isfinite(value), std::string(field) + " finite");
  require(value >= 0.0, std::string(field) + " >= 0");
}

void check(const MealEventPayload& meal) {
  require_nonnegative(meal.carbs, "carbs");
  require_nonnegative(meal.protein, "protein");
  require_nonnegative(meal.fat, "fat");
  require_nonnegative(meal.alcohol_units, "alcohol_units");
  require(meal.carbs <= kMaxMealCarbs, "carbs <= 500");
  if (meal.meal_profile_id) require(!meal.meal_profile_id->empty(), "meal_profile_id non-empty");
}

void check(const ExerciseEventPayload& exercise) {
  require(!exercise.exercise_type.empty(), "exercise_type non-empty");
  require(exercise.intensity >= 1 && exercise.intensity <= 3, "intensity in {1,2,3}");
  require(std::isfinite(exercise.duration) && exercise.duration > 0.0, "duration > 0");
  require(exercise.duration <= kMaxExerciseMinutes, "duration <= 600");
}

void check(const InsulinDosePayload& dose) {
  require_nonnegative(dose.units, "units");
  require(dose.units <= kMaxDoseUnits, "units <= 50");
  const double steps = dose.units / kDoseIncrement;
  require(steps == std::floor(steps), "units multiple of 0.5");
}

void check(const HealthFlagPayload&) {}

}  // namespace

void validate_payload(const EventPayload& payload) {
  std::visit([](const auto& p) { check(p); }, payload);
}

void validate_meal_profile(const MealProfile& profile) {
  require(!profile.id.empty(), "id non-empty");
  require(!profile.name.empty(), "name non-empty");
  require_nonnegative(profile.carbs, "carbs");
  require_nonnegative(profile.protein, "protein");
  require_nonnegative(profile.fat, "fat");
}

void validate_reading(const GlucoseReading& reading, std::optional<Timestamp> previous) {
  require(std::isfinite(reading.value) && reading.value > 0.0 && reading.value <= kMaxGlucose,
          "glucose value in (0, 40]");
  if (previous && reading.timestamp <= *previous) {
    throw Error(ErrorCode::OutOfOrder, "reading at " + format_timestamp(reading.timestamp) +
                                           " not after " + format_timestamp(*previous));
  }
}

ValidationContext::ValidationContext(std::span<const DiaryEvent> log) {
  for (const auto& event : log) admit(event);
}

void ValidationContext::check(const DiaryEvent& event) const {
  require(!event.id.empty(), "id non-empty");
  require(!ids_.contains(event.id), "id unique (" + event.id + ")");
  validate_payload(event.payload);
  if (head_ && event.timestamp < *head_) {
    throw Error(ErrorCode::OutOfOrder, "event at " + format_timestamp(event.timestamp) +
                                           " precedes log head " + format_timestamp(*head_));
  }
  if (const auto* flag = event.get_if<HealthFlagPayload>()) {
    switch (flag->flag) {
      case HealthFlag::StressOn: require(!stress_on_, "stress flags alternate"); break;
      case HealthFlag::StressOff: require(stress_on_, "stress flags alternate"); break;
      case HealthFlag::IllnessOn: require(!illness_on_, "illness flags alternate"); break;
      case HealthFlag::IllnessOff: require(illness_on_, "illness flags alternate"); break;
    }
  }
}

void ValidationContext::admit(const DiaryEvent& event) {
  ids_.insert(event.id);
  if (!head_ || event.timestamp > *head_) head_ = event.timestamp;
  if (const auto* flag = event.get_if<HealthFlagPayload>()) {
    switch (flag->flag) {
      case HealthFlag::StressOn: stress_on_ = true; break;
      case HealthFlag::StressOff: stress_on_ = false; break;
      case HealthFlag::IllnessOn: illness_on_ = true; break;
      case HealthFlag::IllnessOff: illness_on_ = false; break;
    }
  }
}

DiaryEvent validate_event(const DiaryEvent& event, std::span<const DiaryEvent> log_context) {
  ValidationContext(log_context).check(event);
  return event;
}

MealCategory default_meal_category(std::chrono::minutes time_of_day) {
  using std::chrono::minutes;
  const auto m = ((time_of_day.count() % 1440) + 1440) % 1440;
  if (m >= 5 * 60 && m < 10 * 60 + 30) return MealCategory::Breakfast;
  if (m >= 10 * 60 + 30 && m < 15 * 60) return MealCategory::Lunch;
  if (m >= 15 * 60 && m < 22 * 60) return MealCategory::Meal;
  return MealCategory::Snack;
}

MealCategory default_meal_category(Timestamp t) { return default_meal_category(time_of_day(t)); }

}  // namespace glucoscope
