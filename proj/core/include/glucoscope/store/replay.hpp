#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "glucoscope/domain/types.hpp"

namespace glucoscope::store {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

// 64-bit FNV-1a; stable across platforms and runs.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash = kFnvOffset);

// Everything derived from the log by a left fold. Replaying the same log from
// empty must reproduce it exactly.
struct DerivedState {
  std::size_t event_count = 0;
  std::array<std::size_t, 4> kind_counts{};  // indexed by EventKind
  double total_carbs = 0.0;
  double total_insulin = 0.0;
  double exercise_minutes = 0.0;
  bool stress_active = false;
  bool illness_active = false;
  std::optional<Timestamp> last_event;
  std::map<std::string, std::size_t> meal_profile_uses;
  std::size_t reading_count = 0;
  std::optional<Timestamp> last_reading;
  std::uint64_t log_digest = kFnvOffset;  // chained over canonical NDJSON lines
  std::uint64_t reading_digest = kFnvOffset;

  bool operator==(const DerivedState&) const = default;
};

DerivedState fold(std::span<const DiaryEvent> events, std::span<const GlucoseReading> readings);

void to_json(nlohmann::json& j, const DerivedState& s);

// Hash of the canonical JSON form of the state.
std::uint64_t state_hash(const DerivedState& state);

}  // namespace glucoscope::store
