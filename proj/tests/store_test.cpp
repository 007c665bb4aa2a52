#include <stdlib.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <random>
#include <sstream>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "glucoscope/domain/error.hpp"
#include "glucoscope/domain/serialization.hpp"
#include "glucoscope/store/cgm_simulator.hpp"
#include "glucoscope/store/demo.hpp"
#include "glucoscope/store/event_store.hpp"
#include "glucoscope/store/period_statistics.hpp"
#include "glucoscope/store/replay.hpp"

using namespace glucoscope;
using namespace glucoscope::store;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

const Timestamp t0 = parse_timestamp("2024-03-01T08:00:00Z");

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "glucoscope-XXXXXX").string();
    path_ = ::mkdtemp(tmpl.data());
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string read_all_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

DiaryEvent meal(std::string id, Timestamp t, double carbs) {
  MealEventPayload p;
  p.carbs = carbs;
  return {std::move(id), t, p};
}

DiaryEvent dose(std::string id, Timestamp t, double units) {
  return {std::move(id), t, InsulinDosePayload{units, DoseSource::Manual}};
}

DiaryEvent exercise(std::string id, Timestamp t, double minutes) {
  return {std::move(id), t, ExerciseEventPayload{"run", 2, minutes}};
}

std::vector<GlucoseReading> stream(Timestamp start, const std::vector<double>& values) {
  std::vector<GlucoseReading> r;
  for (std::size_t i = 0; i < values.size(); ++i) r.push_back({start + 5min * static_cast<long>(i), values[i]});
  return r;
}

std::uint64_t demo_hash(const fs::path& dir) {
  EventStore store(dir);
  DemoOptions options;
  options.days = 5;
  options.seed = 99;
  options.end = t0;
  seed_demo(store, options);
  EventStore reopened(dir);
  return state_hash(fold(reopened.events(), reopened.readings()));
}

}  // namespace

TEST(EventStore, SequenceNumbers) {
  EventStore store;
  const auto n = store.append(meal("a", t0, 40));
  EXPECT_EQ(store.append(dose("b", t0, 4)), n + 1);
  EXPECT_EQ(store.sequence(), n + 1);
  const auto fresh = store.append(meal("", t0 + 1min, 10));
  EXPECT_EQ(fresh, n + 2);
  EXPECT_FALSE(store.events().back().id.empty());
}

TEST(EventStore, InvalidAppendLeavesLogUnchanged) {
  TempDir dir;
  EventStore store(dir.path());
  store.append(meal("a", t0, 40));
  const auto before = read_all_text(dir.path() / "events.ndjson");
  try {
    store.append(meal("b", t0 + 1min, -5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvariantViolation);
  }
  try {
    store.append(meal("c", t0 - 1min, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfOrder);
  }
  EXPECT_EQ(store.events().size(), 1u);
  EXPECT_EQ(store.sequence(), 1u);
  EXPECT_EQ(read_all_text(dir.path() / "events.ndjson"), before);
}

TEST(EventStore, BatchIsAllOrNothing) {
  EventStore store;
  std::vector<DiaryEvent> bad{meal("a", t0, 40), dose("b", t0, 4.2)};
  EXPECT_THROW(store.append_batch(bad), Error);
  EXPECT_TRUE(store.events().empty());
  std::vector<DiaryEvent> dup{meal("a", t0, 40), dose("a", t0, 4)};
  EXPECT_THROW(store.append_batch(dup), Error);
  EXPECT_TRUE(store.events().empty());
  auto ok = store.append_batch({meal("", t0, 40), dose("", t0, 4)});
  ASSERT_EQ(ok.size(), 2u);
  EXPECT_EQ(ok[1].sequence, 2u);
  EXPECT_NE(ok[0].event.id, ok[1].event.id);
}

TEST(EventStore, CrashRecovery) {
  TempDir dir;
  {
    EventStore store(dir.path());
    store.append(meal("a", t0, 40));
    store.append(dose("b", t0, 4));
    store.append_reading({t0, 6.1});
  }
  // Simulate a crash halfway through writing a third record.
  {
    std::ofstream out(dir.path() / "events.ndjson", std::ios::app);
    out << R"({"id":"c","timestamp":"2024-03-01T09:00:00Z","kind":"me)";
    std::ofstream rout(dir.path() / "readings.ndjson", std::ios::app);
    rout << R"({"timestamp":"2024-03-01T08:05)";
  }
  EventStore store(dir.path());
  ASSERT_EQ(store.events().size(), 2u);
  EXPECT_EQ(store.events()[1], dose("b", t0, 4));
  EXPECT_EQ(store.readings().size(), 1u);
  // The torn tail is gone, so new appends produce a clean file.
  store.append(meal("c", t0 + 1h, 20));
  EventStore again(dir.path());
  EXPECT_EQ(again.events().size(), 3u);
  EXPECT_EQ(again.sequence(), 3u);
}

TEST(EventStore, CorruptMiddleLineIsAStorageFailure) {
  TempDir dir;
  {
    std::ofstream out(dir.path() / "events.ndjson");
    out << "not json\n" << encode(meal("a", t0, 40)) << "\n";
  }
  try {
    EventStore store(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StorageFailure);
  }
}

TEST(EventStore, HalfOpenQuery) {
  EventStore store;
  store.append(meal("a", t0, 40));
  store.append(exercise("b", t0 + 1h, 30));
  store.append(dose("c", t0 + 2h, 2));
  EXPECT_TRUE(EventStore{}.query({t0, t0 + 24h}).empty());
  auto q = store.query({t0, t0 + 2h});
  ASSERT_EQ(q.size(), 2u);
  EXPECT_EQ(q[1].id, "b");
  EXPECT_EQ(store.query({t0 + 1h, t0 + 3h}, {EventKind::InsulinDose}).size(), 1u);
  EXPECT_EQ(store.query({t0 - 1h, t0 + 3h}), store.events());
}

TEST(EventStore, KindFilterOnDemoWeek) {
  EventStore store;
  DemoOptions options;
  options.days = 7;
  options.end = t0;
  seed_demo(store, options);
  auto meals = store.query({t0 - std::chrono::days{7}, t0 + 1s}, {EventKind::Meal});
  EXPECT_FALSE(meals.empty());
  for (const auto& e : meals) EXPECT_EQ(e.kind(), EventKind::Meal);
  EXPECT_EQ(store.query({t0 - std::chrono::days{8}, t0 + 1s}).size(), store.events().size());
}

TEST(EventStore, ReadingsOrderedAndPersisted) {
  TempDir dir;
  {
    EventStore store(dir.path());
    store.append_readings(stream(t0, {5.0, 5.5, 6.0}));
    EXPECT_THROW(store.append_reading({t0, 7.0}), Error);
    EXPECT_THROW(store.append_readings(stream(t0 + 1h, {5.0, 0.0})), Error);
    EXPECT_EQ(store.readings().size(), 3u);
  }
  EventStore store(dir.path());
  EXPECT_EQ(store.readings({t0 + 5min, t0 + 10min}).size(), 1u);
  EXPECT_EQ(store.latest_reading()->value, 6.0);
}

TEST(EventStore, SettingsAndMeals) {
  TempDir dir;
  {
    EventStore store(dir.path());
    EXPECT_EQ(store.settings(), PatientSettings{});
    PatientSettings s;
    s.icr = 12;
    store.put_settings(s);
    PatientSettings bad;
    bad.hypo_threshold = 11;
    EXPECT_THROW(store.put_settings(bad), Error);
    auto m = store.put_meal({"", "porridge", 45, 8, 6, "img/p.png", MealCategory::Breakfast, t0});
    EXPECT_FALSE(m.id.empty());
    m.carbs = 50;
    store.put_meal(m);
    EXPECT_EQ(store.meals().size(), 1u);
  }
  EventStore store(dir.path());
  EXPECT_EQ(store.settings().icr, 12.0);
  ASSERT_EQ(store.meals().size(), 1u);
  EXPECT_EQ(store.meals()[0].carbs, 50.0);
  EXPECT_TRUE(store.meal(store.meals()[0].id).has_value());
  EXPECT_FALSE(store.meal("nope").has_value());
}

TEST(EventStore, ReadersSeeAPrefix) {
  EventStore store;
  std::atomic<bool> done{false};
  std::thread writer([&] {
    for (int i = 0; i < 500; ++i) store.append(meal("m" + std::to_string(i), t0 + std::chrono::minutes{i}, 10));
    done = true;
  });
  std::size_t last = 0;
  while (!done) {
    auto snap = store.snapshot();
    ASSERT_EQ(snap.events.size(), snap.sequence);
    ASSERT_GE(snap.events.size(), last);
    for (std::size_t i = 0; i < snap.events.size(); ++i) ASSERT_EQ(snap.events[i].id, "m" + std::to_string(i));
    last = snap.events.size();
  }
  writer.join();
  EXPECT_EQ(store.events().size(), 500u);
}

TEST(CgmSimulator, DayCadence) {
  CgmSimulatorConfig config;
  config.seed = 3;
  config.noise_sd = 0.2;
  auto r = simulate_cgm(config, t0, 24h);
  ASSERT_EQ(r.size(), 289u);
  for (std::size_t i = 1; i < r.size(); ++i) ASSERT_EQ(r[i].timestamp - r[i - 1].timestamp, 300s);
  EXPECT_THROW(simulate_cgm(config, t0, 7min), Error);
}

TEST(CgmSimulator, NoiselessQuiescentIsConstant) {
  CgmSimulatorConfig config;
  for (const auto& r : simulate_cgm(config, t0, 24h)) ASSERT_NEAR(r.value, config.params.basal_glucose, 1e-6);
}

TEST(CgmSimulator, SameSeedSameStream) {
  CgmSimulatorConfig a;
  a.seed = 17;
  a.noise_sd = 0.3;
  a.scenario.push_back({60, MealEventPayload{50}});
  a.scenario.push_back({60, InsulinDosePayload{5, DoseSource::Manual}});
  auto s1 = simulate_cgm(a, t0, 12h);
  EXPECT_EQ(s1, simulate_cgm(a, t0, 12h));
  auto b = a;
  b.seed = 18;
  EXPECT_NE(s1, simulate_cgm(b, t0, 12h));
  auto quiet = a;
  quiet.noise_sd = 0;
  quiet.scenario.pop_back();
  auto clean = simulate_cgm(quiet, t0, 12h);
  EXPECT_GT(clean[24].value, clean[0].value + 2);  // meal without insulin
}

TEST(CgmSimulator, NoiseSequenceIsPinned) {
  // Box-Muller over mt19937_64, independent of the standard library's
  // distributions; the first draws for seed 42 are fixed.
  GaussianNoise n(42);
  std::vector<double> draws;
  for (int i = 0; i < 4; ++i) draws.push_back(n.next());
  GaussianNoise m(42);
  for (double d : draws) EXPECT_EQ(m.next(), d);
  double sum = 0, sq = 0;
  GaussianNoise big(1);
  for (int i = 0; i < 200000; ++i) {
    double v = big.next();
    sum += v;
    sq += v * v;
  }
  EXPECT_NEAR(sum / 200000, 0.0, 0.01);
  EXPECT_NEAR(sq / 200000, 1.0, 0.02);
}

TEST(CgmSimulator, ScenarioFile) {
  TempDir dir;
  auto file = dir.path() / "scenario.json";
  std::ofstream(file) << R"({"seed": 5, "noise_sd": 0.1, "params": {"BW": 80},
    "events": [{"offset_minutes": 30, "kind": "meal", "payload": {"carbs": 40, "category": "lunch"}},
               {"offset_minutes": 30, "kind": "insulin_dose", "payload": {"units": 4, "source": "manual"}}]})";
  auto config = load_scenario(file);
  EXPECT_EQ(config.seed, 5u);
  EXPECT_EQ(config.params.body_weight, 80.0);
  ASSERT_EQ(config.scenario.size(), 2u);
  auto events = scenario_events(config, t0);
  EXPECT_EQ(events[0].timestamp, t0 + 30min);
  EXPECT_EQ(events[0].id, "scn-000001");
  std::ofstream(dir.path() / "bad.json") << R"({"events": [{"offset_minutes": 1, "kind": "meal", "payload": {"carbs": -1}}]})";
  EXPECT_THROW(load_scenario(dir.path() / "bad.json"), Error);
}

TEST(PeriodStatistics, EmptyPeriod) {
  auto s = period_statistics(Period::Week, day_of(t0), {}, {}, {});
  EXPECT_EQ(s.total_insulin, 0.0);
  EXPECT_EQ(s.pct_time_in_range, 0.0);
  EXPECT_EQ(s.hypo_count, 0u);
  EXPECT_EQ(s.exercise_minutes, 0.0);
  EXPECT_EQ(s.reading_count, 0u);
}

TEST(PeriodStatistics, Totals) {
  std::vector<DiaryEvent> log{dose("a", t0, 4), exercise("b", t0 + 1h, 30),
                              dose("old", t0 + 2h, 0)};
  auto s = period_statistics(Period::Day, day_of(t0), log, stream(t0, {5, 6, 12, 3}), {});
  EXPECT_EQ(s.total_insulin, 4.0);
  EXPECT_EQ(s.exercise_minutes, 30.0);
  EXPECT_EQ(s.pct_time_in_range, 50.0);
  EXPECT_EQ(s.reading_count, 4u);
  EXPECT_EQ(s.hypo_count, 1u);
}

TEST(PeriodStatistics, Ranges) {
  auto d = day_of(t0);
  EXPECT_EQ(period_range(Period::Day, d).start, Timestamp{d});
  EXPECT_EQ(period_range(Period::Week, d).start, Timestamp{d - std::chrono::days{6}});
  EXPECT_EQ(period_range(Period::Month, d).end, Timestamp{d + std::chrono::days{1}});
  EXPECT_EQ(period_range(Period::Month, d).start, Timestamp{d - std::chrono::days{29}});
  EXPECT_EQ(parse_period("week"), Period::Week);
  EXPECT_THROW(parse_period("year"), Error);
}

// Run-length oracle: an episode starts at a low reading that follows at least
// three non-low readings (or the start of the stream).
TEST(HypoEpisodes, MatchesRunLengthOracle) {
  EXPECT_EQ(count_hypo_episodes(stream(t0, {6, 3.5, 3.4, 3.3, 6}), 3.9), 1u);
  EXPECT_EQ(count_hypo_episodes(stream(t0, {3.5, 6, 6, 3.5}), 3.9), 1u);
  EXPECT_EQ(count_hypo_episodes(stream(t0, {3.5, 6, 6, 6, 3.5}), 3.9), 2u);
  EXPECT_EQ(count_hypo_episodes(stream(t0, {3.9, 3.9}), 3.9), 0u);

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(200);
    for (auto& x : v) x = (rng() % 4 == 0) ? 3.0 : 6.0;
    std::size_t expected = 0, above = 3;
    for (double x : v) {
      if (x < 3.9) {
        if (above >= 3) ++expected;
        above = 0;
      } else {
        ++above;
      }
    }
    ASSERT_EQ(count_hypo_episodes(stream(t0, v), 3.9), expected);
  }
}

TEST(Replay, FoldIsDeterministic) {
  std::vector<DiaryEvent> log{meal("a", t0, 40), dose("b", t0, 4),
                              {"c", t0 + 1h, HealthFlagPayload{HealthFlag::StressOn}},
                              exercise("d", t0 + 2h, 45)};
  auto readings = stream(t0, {5, 6, 7});
  auto s = fold(log, readings);
  EXPECT_EQ(s.event_count, 4u);
  EXPECT_EQ(s.total_carbs, 40.0);
  EXPECT_EQ(s.total_insulin, 4.0);
  EXPECT_EQ(s.exercise_minutes, 45.0);
  EXPECT_TRUE(s.stress_active);
  EXPECT_EQ(s.reading_count, 3u);
  EXPECT_EQ(state_hash(s), state_hash(fold(log, readings)));
  log.pop_back();
  EXPECT_NE(state_hash(s), state_hash(fold(log, readings)));
  EXPECT_EQ(fnv1a(""), kFnvOffset);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Replay, SeededDemoHashStableAcrossRuns) {
  TempDir a, b;
  EXPECT_EQ(demo_hash(a.path()), demo_hash(b.path()));
}

TEST(Demo, Shape) {
  EventStore store;
  DemoOptions options;
  options.days = 14;
  options.end = t0;
  auto summary = seed_demo(store, options);
  EXPECT_EQ(summary.readings, 14u * 288 + 1);
  EXPECT_EQ(summary.end, t0);
  EXPECT_EQ(store.meals().size(), summary.meal_profiles);
  EXPECT_GE(summary.events, 14u * 6);
  EXPECT_THROW(seed_demo(store, options), Error);
}
