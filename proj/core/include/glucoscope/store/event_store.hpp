#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "glucoscope/domain/settings.hpp"
#include "glucoscope/domain/types.hpp"
#include "glucoscope/domain/validation.hpp"

namespace glucoscope::store {

class KindSet {
 public:
  constexpr KindSet() = default;
  constexpr KindSet(std::initializer_list<EventKind> kinds) {
    for (auto k : kinds) bits_ |= bit(k);
  }
  static constexpr KindSet all() { return {EventKind::Meal, EventKind::Exercise,
                                           EventKind::InsulinDose, EventKind::HealthFlag}; }

  constexpr bool contains(EventKind k) const { return (bits_ & bit(k)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }

 private:
  static constexpr unsigned bit(EventKind k) { return 1u << static_cast<unsigned>(k); }
  unsigned bits_ = 0;
};

struct Appended {
  std::uint64_t sequence = 0;
  DiaryEvent event;  // as stored, with its id filled in
};

// Consistent copy of everything a request needs, taken under one lock.
struct Snapshot {
  std::vector<DiaryEvent> events;
  std::vector<GlucoseReading> readings;
  PatientSettings settings;
  std::vector<MealProfile> meals;
  std::uint64_t sequence = 0;
};

// Append-only diary persistence. With a data directory the log lives in
// events.ndjson / readings.ndjson (one JSON record per line) next to
// settings.json and meals.json; every append is fsync'ed before it returns.
// A torn final line left by a crash is dropped when the store is reopened.
//
// One writer at a time, any number of readers; readers always observe a
// prefix of the log.
class EventStore {
 public:
  // In-memory store, nothing persisted.
  EventStore();
  // Opens (creating if needed) a store rooted at `data_dir`.
  explicit EventStore(const std::filesystem::path& data_dir);
  ~EventStore();

  EventStore(const EventStore&) = delete;
  EventStore& operator=(const EventStore&) = delete;

  // Validates and appends; returns the event's sequence number (1-based).
  // An empty id is replaced by a fresh one.
  std::uint64_t append(DiaryEvent event);
  // All-or-nothing: nothing is written unless every event validates.
  std::vector<Appended> append_batch(std::vector<DiaryEvent> events);

  void append_reading(const GlucoseReading& reading);
  void append_readings(std::span<const GlucoseReading> readings);

  // Events with timestamp in [range.start, range.end) whose kind is in `kinds`.
  std::vector<DiaryEvent> query(const TimeRange& range, KindSet kinds = KindSet::all()) const;
  std::vector<DiaryEvent> events() const;
  std::vector<GlucoseReading> readings(const TimeRange& range) const;
  std::vector<GlucoseReading> readings() const;
  std::optional<GlucoseReading> latest_reading() const;

  PatientSettings settings() const;
  // Validated first; an invalid value leaves the stored settings untouched.
  void put_settings(const PatientSettings& settings);

  std::vector<MealProfile> meals() const;
  std::optional<MealProfile> meal(const std::string& id) const;
  // Inserts or replaces by id; an empty id gets a fresh one. Returns the stored profile.
  MealProfile put_meal(MealProfile profile);

  Snapshot snapshot() const;
  std::uint64_t sequence() const;
  const std::optional<std::filesystem::path>& data_dir() const { return data_dir_; }

 private:
  class AppendFile;

  void load();
  void write_json_document(const std::filesystem::path& file, const std::string& text) const;

  std::optional<std::filesystem::path> data_dir_;
  std::unique_ptr<AppendFile> event_file_;
  std::unique_ptr<AppendFile> reading_file_;

  mutable std::shared_mutex mutex_;
  std::vector<DiaryEvent> events_;
  std::vector<GlucoseReading> readings_;
  ValidationContext context_;
  PatientSettings settings_;
  std::vector<MealProfile> meals_;
};

}  // namespace glucoscope::store
