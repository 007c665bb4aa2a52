#include "glucoscope/store/event_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include "glucoscope/domain/error.hpp"
#include "glucoscope/domain/serialization.hpp"

namespace glucoscope::store {
namespace fs = std::filesystem;

namespace {

constexpr const char* kEventsFile = "events.ndjson";
constexpr const char* kReadingsFile = "readings.ndjson";
constexpr const char* kSettingsFile = "settings.json";
constexpr const char* kMealsFile = "meals.json";

[[noreturn]] void storage_failure(const std::string& what) {
  throw Error(ErrorCode::StorageFailure, what + ": " + std::strerror(errno));
}

std::string numbered_event_id(std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "evt-%06llu", static_cast<unsigned long long>(n));
  return buf;
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return {};
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Parses complete lines; a trailing fragment without newline is a torn write
// and is cut off the file.
template <typename Record, typename Sink>
void replay_ndjson(const fs::path& file, Sink&& sink) {
  const std::string text = read_file(file);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      fs::resize_file(file, pos);
      return;
    }
    ++line_no;
    const std::string_view line(text.data() + pos, nl - pos);
    if (!line.empty()) {
      try {
        sink(decode_text<Record>(line));
      } catch (const Error& e) {
        throw Error(ErrorCode::StorageFailure,
                    file.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    pos = nl + 1;
  }
}

}  // namespace

class EventStore::AppendFile {
 public:
  explicit AppendFile(const fs::path& path) : path_(path) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) storage_failure("open " + path.string());
  }
  ~AppendFile() {
    if (fd_ >= 0) ::close(fd_);
  }
  AppendFile(const AppendFile&) = delete;
  AppendFile& operator=(const AppendFile&) = delete;

  void write_durably(const std::string& data) {
    const char* p = data.data();
    std::size_t left = data.size();
    while (left > 0) {
      const ssize_t n = ::write(fd_, p, left);
      if (n < 0) {
        if (errno == EINTR) continue;
        storage_failure("write " + path_.string());
      }
      p += n;
      left -= static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) storage_failure("fsync " + path_.string());
  }

 private:
  fs::path path_;
  int fd_ = -1;
};

EventStore::EventStore() = default;

EventStore::EventStore(const fs::path& data_dir) : data_dir_(data_dir) {
  std::error_code ec;
  fs::create_directories(data_dir, ec);
  if (ec) throw Error(ErrorCode::StorageFailure, "create " + data_dir.string() + ": " + ec.message());
  load();
  event_file_ = std::make_unique<AppendFile>(data_dir / kEventsFile);
  reading_file_ = std::make_unique<AppendFile>(data_dir / kReadingsFile);
}

EventStore::~EventStore() = default;

void EventStore::load() {
  const fs::path dir = *data_dir_;
  replay_ndjson<DiaryEvent>(dir / kEventsFile, [this](DiaryEvent e) {
    context_.check(e);
    context_.admit(e);
    events_.push_back(std::move(e));
  });
  replay_ndjson<GlucoseReading>(dir / kReadingsFile, [this](GlucoseReading r) {
    validate_reading(r, readings_.empty() ? std::nullopt
                                          : std::optional<Timestamp>(readings_.back().timestamp));
    readings_.push_back(r);
  });
  try {
    if (fs::exists(dir / kSettingsFile)) {
      settings_ = decode_text<PatientSettings>(read_file(dir / kSettingsFile));
      validate(settings_);
    }
    if (fs::exists(dir / kMealsFile)) {
      meals_ = decode_text<std::vector<MealProfile>>(read_file(dir / kMealsFile));
    }
  } catch (const Error& e) {
    throw Error(ErrorCode::StorageFailure, e.what());
  }
}

std::uint64_t EventStore::append(DiaryEvent event) {
  std::vector<DiaryEvent> one;
  one.push_back(std::move(event));
  return append_batch(std::move(one)).front().sequence;
}

std::vector<Appended> EventStore::append_batch(std::vector<DiaryEvent> batch) {
  std::unique_lock lock(mutex_);
  ValidationContext staged = context_;
  std::string lines;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto& event = batch[i];
    if (event.id.empty()) {
      // Ids already taken by earlier members of this batch live in `staged`.
      for (std::uint64_t n = events_.size() + i + 1; event.id.empty(); ++n) {
        std::string id = numbered_event_id(n);
        if (!staged.contains_id(id)) event.id = std::move(id);
      }
    }
    staged.check(event);
    staged.admit(event);
    lines += encode(event);
    lines += '\n';
  }
  if (event_file_) event_file_->write_durably(lines);

  std::vector<Appended> appended;
  appended.reserve(batch.size());
  for (auto& event : batch) {
    events_.push_back(std::move(event));
    appended.push_back({events_.size(), events_.back()});
  }
  context_ = std::move(staged);
  return appended;
}

void EventStore::append_reading(const GlucoseReading& reading) {
  append_readings(std::span(&reading, 1));
}

void EventStore::append_readings(std::span<const GlucoseReading> batch) {
  std::unique_lock lock(mutex_);
  std::optional<Timestamp> previous;
  if (!readings_.empty()) previous = readings_.back().timestamp;
  std::string lines;
  for (const auto& r : batch) {
    validate_reading(r, previous);
    previous = r.timestamp;
    lines += encode(r);
    lines += '\n';
  }
  if (reading_file_) reading_file_->write_durably(lines);
  readings_.insert(readings_.end(), batch.begin(), batch.end());
}

std::vector<DiaryEvent> EventStore::query(const TimeRange& range, KindSet kinds) const {
  std::shared_lock lock(mutex_);
  std::vector<DiaryEvent> out;
  auto it = std::lower_bound(events_.begin(), events_.end(), range.start,
                             [](const DiaryEvent& e, Timestamp t) { return e.timestamp < t; });
  for (; it != events_.end() && it->timestamp < range.end; ++it) {
    if (kinds.contains(it->kind())) out.push_back(*it);
  }
  return out;
}

std::vector<DiaryEvent> EventStore::events() const {
  std::shared_lock lock(mutex_);
  return events_;
}

std::vector<GlucoseReading> EventStore::readings(const TimeRange& range) const {
  std::shared_lock lock(mutex_);
  auto first = std::lower_bound(readings_.begin(), readings_.end(), range.start,
                                [](const GlucoseReading& r, Timestamp t) { return r.timestamp < t; });
  auto last = std::lower_bound(first, readings_.end(), range.end,
                               [](const GlucoseReading& r, Timestamp t) { return r.timestamp < t; });
  return {first, last};
}

std::vector<GlucoseReading> EventStore::readings() const {
  std::shared_lock lock(mutex_);
  return readings_;
}

std::optional<GlucoseReading> EventStore::latest_reading() const {
  std::shared_lock lock(mutex_);
  if (readings_.empty()) return std::nullopt;
  return readings_.back();
}

PatientSettings EventStore::settings() const {
  std::shared_lock lock(mutex_);
  return settings_;
}

void EventStore::write_json_document(const fs::path& file, const std::string& text) const {
  const fs::path tmp = file.string() + ".tmp";
  {
    AppendFile out(tmp);
    if (::truncate(tmp.c_str(), 0) != 0) storage_failure("truncate " + tmp.string());
    out.write_durably(text);
  }
  std::error_code ec;
  fs::rename(tmp, file, ec);
  if (ec) throw Error(ErrorCode::StorageFailure, "rename " + file.string() + ": " + ec.message());
}

void EventStore::put_settings(const PatientSettings& settings) {
  validate(settings);
  std::unique_lock lock(mutex_);
  if (data_dir_) write_json_document(*data_dir_ / kSettingsFile, Json(settings).dump(2));
  settings_ = settings;
}

std::vector<MealProfile> EventStore::meals() const {
  std::shared_lock lock(mutex_);
  return meals_;
}

std::optional<MealProfile> EventStore::meal(const std::string& id) const {
  std::shared_lock lock(mutex_);
  for (const auto& m : meals_) {
    if (m.id == id) return m;
  }
  return std::nullopt;
}

MealProfile EventStore::put_meal(MealProfile profile) {
  std::unique_lock lock(mutex_);
  if (profile.id.empty()) {
    for (std::size_t n = meals_.size() + 1;; ++n) {
      std::string id = "meal-" + std::to_string(n);
      if (std::none_of(meals_.begin(), meals_.end(),
                       [&](const MealProfile& m) { return m.id == id; })) {
        profile.id = std::move(id);
        break;
      }
    }
  }
  validate_meal_profile(profile);
  std::vector<MealProfile> updated = meals_;
  auto it = std::find_if(updated.begin(), updated.end(),
                         [&](const MealProfile& m) { return m.id == profile.id; });
  if (it != updated.end()) {
    *it = profile;
  } else {
    updated.push_back(profile);
  }
  if (data_dir_) write_json_document(*data_dir_ / kMealsFile, Json(updated).dump(2));
  meals_ = std::move(updated);
  return profile;
}

Snapshot EventStore::snapshot() const {
  std::shared_lock lock(mutex_);
  return {events_, readings_, settings_, meals_, events_.size()};
}

std::uint64_t EventStore::sequence() const {
  std::shared_lock lock(mutex_);
  return events_.size();
}

}  // namespace glucoscope::store
