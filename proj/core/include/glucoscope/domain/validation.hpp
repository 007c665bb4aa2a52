#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>

#include "glucoscope/domain/types.hpp"

namespace glucoscope {

// Payload-only checks (sign constraints, sanity bounds, dose quantization).
void validate_payload(const EventPayload& payload);
void validate_meal_profile(const MealProfile& profile);
// Value in (0, 40] and strictly after `previous` when given.
void validate_reading(const GlucoseReading& reading, std::optional<Timestamp> previous);

// Incremental view of a time-ordered event log: the ids in use, the latest
// timestamp, and which health flags are currently on. Lets an append be
// validated in O(1) instead of rescanning the log.
class ValidationContext {
 public:
  ValidationContext() = default;
  explicit ValidationContext(std::span<const DiaryEvent> log);

  // Throws InvariantViolation or OutOfOrder; never mutates.
  void check(const DiaryEvent& event) const;
  // Records an event that already passed check().
  void admit(const DiaryEvent& event);

  std::optional<Timestamp> head() const noexcept { return head_; }
  bool stress_on() const noexcept { return stress_on_; }
  bool illness_on() const noexcept { return illness_on_; }
  bool contains_id(const std::string& id) const { return ids_.contains(id); }

 private:
  std::unordered_set<std::string> ids_;
  std::optional<Timestamp> head_;
  bool stress_on_ = false;
  bool illness_on_ = false;
};

// Validates `event` against every type invariant and against the prior log.
// Events may share the head timestamp (a meal and its dose), never precede it.
DiaryEvent validate_event(const DiaryEvent& event, std::span<const DiaryEvent> log_context);

// Breakfast [05:00, 10:30), Lunch [10:30, 15:00), Meal [15:00, 22:00), Snack otherwise.
MealCategory default_meal_category(std::chrono::minutes time_of_day);
MealCategory default_meal_category(Timestamp t);

}  // namespace glucoscope
