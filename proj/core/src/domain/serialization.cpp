#include "glucoscope/domain/serialization.hpp"

namespace glucoscope {
namespace {

Timestamp time_field(const Json& j, const char* key) {
  return parse_timestamp(j.at(key).get<std::string>());
}

double number_or_zero(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return 0.0;
  return it->get<double>();
}

}  // namespace

void to_json(Json& j, const GlucoseReading& r) {
  j = Json{{"timestamp", format_timestamp(r.timestamp)}, {"value", r.value}};
}

void from_json(const Json& j, GlucoseReading& r) {
  r.timestamp = time_field(j, "timestamp");
  r.value = j.at("value").get<double>();
}

void to_json(Json& j, const MealEventPayload& p) {
  j = Json{{"carbs", p.carbs},
           {"protein", p.protein},
           {"fat", p.fat},
           {"alcohol_units", p.alcohol_units},
           {"meal_profile_id", p.meal_profile_id ? Json(*p.meal_profile_id) : Json(nullptr)},
           {"category", to_string(p.category)}};
}

void from_json(const Json& j, MealEventPayload& p) {
  p.carbs = j.at("carbs").get<double>();
  p.protein = number_or_zero(j, "protein");
  p.fat = number_or_zero(j, "fat");
  p.alcohol_units = number_or_zero(j, "alcohol_units");
  p.meal_profile_id.reset();
  if (const auto it = j.find("meal_profile_id"); it != j.end() && !it->is_null()) {
    p.meal_profile_id = it->get<std::string>();
  }
  p.category = parse_meal_category(j.at("category").get<std::string>());
}

void to_json(Json& j, const ExerciseEventPayload& p) {
  j = Json{{"exercise_type", p.exercise_type},
           {"intensity", p.intensity},
           {"duration", p.duration}};
}

void from_json(const Json& j, ExerciseEventPayload& p) {
  p.exercise_type = j.at("exercise_type").get<std::string>();
  p.intensity = j.at("intensity").get<int>();
  p.duration = j.at("duration").get<double>();
}

void to_json(Json& j, const InsulinDosePayload& p) {
  j = Json{{"units", p.units}, {"source", to_string(p.source)}};
}

void from_json(const Json& j, InsulinDosePayload& p) {
  p.units = j.at("units").get<double>();
  p.source = parse_dose_source(j.at("source").get<std::string>());
}

void to_json(Json& j, const HealthFlagPayload& p) { j = Json{{"flag", to_string(p.flag)}}; }

void from_json(const Json& j, HealthFlagPayload& p) {
  p.flag = parse_health_flag(j.at("flag").get<std::string>());
}

void to_json(Json& j, const DiaryEvent& e) {
  Json payload;
  std::visit([&payload](const auto& p) { payload = p; }, e.payload);
  j = Json{{"id", e.id},
           {"timestamp", format_timestamp(e.timestamp)},
           {"kind", to_string(e.kind())},
           {"payload", std::move(payload)}};
}

void from_json(const Json& j, DiaryEvent& e) {
  e.id = j.value("id", std::string{});
  e.timestamp = time_field(j, "timestamp");
  const Json& payload = j.at("payload");
  switch (parse_event_kind(j.at("kind").get<std::string>())) {
    case EventKind::Meal: e.payload = payload.get<MealEventPayload>(); break;
    case EventKind::Exercise: e.payload = payload.get<ExerciseEventPayload>(); break;
    case EventKind::InsulinDose: e.payload = payload.get<InsulinDosePayload>(); break;
    case EventKind::HealthFlag: e.payload = payload.get<HealthFlagPayload>(); break;
  }
}

void to_json(Json& j, const MealProfile& m) {
  j = Json{{"id", m.id},
           {"name", m.name},
           {"carbs", m.carbs},
           {"protein", m.protein},
           {"fat", m.fat},
           {"image_ref", m.image_ref},
           {"category", to_string(m.category)},
           {"created_at", format_timestamp(m.created_at)}};
}

void from_json(const Json& j, MealProfile& m) {
  m.id = j.value("id", std::string{});
  m.name = j.at("name").get<std::string>();
  m.carbs = j.at("carbs").get<double>();
  m.protein = number_or_zero(j, "protein");
  m.fat = number_or_zero(j, "fat");
  m.image_ref = j.value("image_ref", std::string{});
  m.category = parse_meal_category(j.at("category").get<std::string>());
  m.created_at = j.contains("created_at") ? time_field(j, "created_at") : Timestamp{};
}

void to_json(Json& j, const PatientSettings& s) {
  j = Json{{"icr", s.icr},
           {"isf", s.isf},
           {"g_target", s.g_target},
           {"dia", s.dia},
           {"hypo_threshold", s.hypo_threshold},
           {"hyper_threshold", s.hyper_threshold},
           {"alert_low", s.alert_low},
           {"alert_high", s.alert_high}};
}

void from_json(const Json& j, PatientSettings& s) {
  s.icr = j.at("icr").get<double>();
  s.isf = j.at("isf").get<double>();
  s.g_target = j.at("g_target").get<double>();
  s.dia = j.at("dia").get<double>();
  s.hypo_threshold = j.at("hypo_threshold").get<double>();
  s.hyper_threshold = j.at("hyper_threshold").get<double>();
  s.alert_low = j.at("alert_low").get<double>();
  s.alert_high = j.at("alert_high").get<double>();
}

}  // namespace glucoscope
