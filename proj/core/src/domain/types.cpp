#include "glucoscope/domain/types.hpp"

#include <array>
#include <utility>

#include "glucoscope/domain/error.hpp"

namespace glucoscope {
namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(const std::array<std::pair<std::string_view, Enum>, N>& table,
                std::string_view name, std::string_view what) {
  for (const auto& [text, value] : table) {
    if (text == name) return value;
  }
  throw Error(ErrorCode::ParseError,
              "unknown " + std::string(what) + " '" + std::string(name) + "'");
}

constexpr std::array<std::pair<std::string_view, EventKind>, 4> kKinds{{
    {"meal", EventKind::Meal},
    {"exercise", EventKind::Exercise},
    {"insulin_dose", EventKind::InsulinDose},
    {"health_flag", EventKind::HealthFlag},
}};

constexpr std::array<std::pair<std::string_view, MealCategory>, 4> kCategories{{
    {"breakfast", MealCategory::Breakfast},
    {"lunch", MealCategory::Lunch},
    {"meal", MealCategory::Meal},
    {"snack", MealCategory::Snack},
}};

constexpr std::array<std::pair<std::string_view, DoseSource>, 2> kSources{{
    {"recommended", DoseSource::Recommended},
    {"manual", DoseSource::Manual},
}};

constexpr std::array<std::pair<std::string_view, HealthFlag>, 4> kFlags{{
    {"stress_on", HealthFlag::StressOn},
    {"stress_off", HealthFlag::StressOff},
    {"illness_on", HealthFlag::IllnessOn},
    {"illness_off", HealthFlag::IllnessOff},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<std::string_view, Enum>, N>& table,
                         Enum value) noexcept {
  for (const auto& [text, v] : table) {
    if (v == value) return text;
  }
  return "unknown";
}

}  // namespace

EventKind kind_of(const EventPayload& payload) noexcept {
  return static_cast<EventKind>(payload.index());
}

std::string_view to_string(EventKind kind) noexcept { return name_of(kKinds, kind); }
std::string_view to_string(MealCategory category) noexcept { return name_of(kCategories, category); }
std::string_view to_string(DoseSource source) noexcept { return name_of(kSources, source); }
std::string_view to_string(HealthFlag flag) noexcept { return name_of(kFlags, flag); }

EventKind parse_event_kind(std::string_view name) { return parse_enum(kKinds, name, "event kind"); }
MealCategory parse_meal_category(std::string_view name) {
  return parse_enum(kCategories, name, "meal category");
}
DoseSource parse_dose_source(std::string_view name) {
  return parse_enum(kSources, name, "dose source");
}
HealthFlag parse_health_flag(std::string_view name) {
  return parse_enum(kFlags, name, "health flag");
}

}  // namespace glucoscope
