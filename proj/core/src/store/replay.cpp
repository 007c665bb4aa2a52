#include "glucoscope/store/replay.hpp"

#include "glucoscope/domain/serialization.hpp"

namespace glucoscope::store {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

DerivedState fold(std::span<const DiaryEvent> events, std::span<const GlucoseReading> readings) {
  DerivedState s;
  for (const auto& event : events) {
    ++s.event_count;
    ++s.kind_counts[static_cast<std::size_t>(event.kind())];
    s.last_event = event.timestamp;
    s.log_digest = fnv1a(encode(event) + '\n', s.log_digest);
    if (const auto* meal = event.get_if<MealEventPayload>()) {
      s.total_carbs += meal->carbs;
      if (meal->meal_profile_id) ++s.meal_profile_uses[*meal->meal_profile_id];
    } else if (const auto* dose = event.get_if<InsulinDosePayload>()) {
      s.total_insulin += dose->units;
    } else if (const auto* ex = event.get_if<ExerciseEventPayload>()) {
      s.exercise_minutes += ex->duration;
    } else if (const auto* flag = event.get_if<HealthFlagPayload>()) {
      switch (flag->flag) {
        case HealthFlag::StressOn: s.stress_active = true; break;
        case HealthFlag::StressOff: s.stress_active = false; break;
        case HealthFlag::IllnessOn: s.illness_active = true; break;
        case HealthFlag::IllnessOff: s.illness_active = false; break;
      }
    }
  }
  for (const auto& r : readings) {
    ++s.reading_count;
    s.last_reading = r.timestamp;
    s.reading_digest = fnv1a(encode(r) + '\n', s.reading_digest);
  }
  return s;
}

void to_json(nlohmann::json& j, const DerivedState& s) {
  auto time_or_null = [](const std::optional<Timestamp>& t) {
    return t ? nlohmann::json(format_timestamp(*t)) : nlohmann::json(nullptr);
  };
  j = nlohmann::json{{"event_count", s.event_count},
                     {"kind_counts", s.kind_counts},
                     {"total_carbs", s.total_carbs},
                     {"total_insulin", s.total_insulin},
                     {"exercise_minutes", s.exercise_minutes},
                     {"stress_active", s.stress_active},
                     {"illness_active", s.illness_active},
                     {"last_event", time_or_null(s.last_event)},
                     {"meal_profile_uses", s.meal_profile_uses},
                     {"reading_count", s.reading_count},
                     {"last_reading", time_or_null(s.last_reading)},
                     {"log_digest", s.log_digest},
                     {"reading_digest", s.reading_digest}};
}

std::uint64_t state_hash(const DerivedState& state) {
  return fnv1a(nlohmann::json(state).dump());
}

}  // namespace glucoscope::store
