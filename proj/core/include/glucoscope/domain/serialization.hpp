#pragma once

// Canonical JSON for the domain types: snake_case keys, RFC 3339 timestamps,
// enums as snake_case strings. Emitted documents always carry every field
// (optionals as null) so a parse/dump cycle reproduces the same bytes.

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "glucoscope/domain/error.hpp"
#include "glucoscope/domain/settings.hpp"
#include "glucoscope/domain/types.hpp"

namespace glucoscope {

using Json = nlohmann::json;

void to_json(Json& j, const GlucoseReading& r);
void from_json(const Json& j, GlucoseReading& r);

void to_json(Json& j, const MealEventPayload& p);
void from_json(const Json& j, MealEventPayload& p);
void to_json(Json& j, const ExerciseEventPayload& p);
void from_json(const Json& j, ExerciseEventPayload& p);
void to_json(Json& j, const InsulinDosePayload& p);
void from_json(const Json& j, InsulinDosePayload& p);
void to_json(Json& j, const HealthFlagPayload& p);
void from_json(const Json& j, HealthFlagPayload& p);

// {"id", "timestamp", "kind", "payload"}; a missing id parses as empty.
void to_json(Json& j, const DiaryEvent& e);
void from_json(const Json& j, DiaryEvent& e);

void to_json(Json& j, const MealProfile& m);
void from_json(const Json& j, MealProfile& m);

void to_json(Json& j, const PatientSettings& s);
void from_json(const Json& j, PatientSettings& s);

// Converts nlohmann parse/type errors into Error(ParseError).
template <typename T>
T decode(const Json& j) {
  try {
    return j.get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

template <typename T>
T decode_text(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return decode<T>(j);
}

template <typename T>
std::string encode(const T& value) {
  return Json(value).dump();
}

}  // namespace glucoscope
