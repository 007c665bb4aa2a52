#include "glucoscope/store/demo.hpp"

#include <algorithm>
#include <random>

#include "glucoscope/bolus/advisor.hpp"
#include "glucoscope/domain/error.hpp"
#include "glucoscope/store/cgm_simulator.hpp"

namespace glucoscope::store {
namespace {

using std::chrono::minutes;

class DemoRandom {
 public:
  explicit DemoRandom(std::uint64_t seed) : engine_(seed) {}
  // Plain modulo keeps the draw identical across standard libraries.
  int between(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool coin() { return (engine_() & 1u) != 0; }

 private:
  std::mt19937_64 engine_;
};

struct PlannedEvent {
  Timestamp time;
  EventPayload payload;
};

}  // namespace

std::vector<MealProfile> demo_meal_library(Timestamp created_at) {
  return {
      {"porridge", "Porridge with berries", 45, 9, 7, "img/porridge.jpg", MealCategory::Breakfast, created_at},
      {"toast", "Toast and eggs", 35, 16, 14, "img/toast.jpg", MealCategory::Breakfast, created_at},
      {"sandwich", "Chicken sandwich", 55, 28, 12, "img/sandwich.jpg", MealCategory::Lunch, created_at},
      {"salad", "Quinoa salad", 30, 10, 15, "img/salad.jpg", MealCategory::Lunch, created_at},
      {"pasta", "Pasta bolognese", 75, 30, 18, "img/pasta.jpg", MealCategory::Meal, created_at},
      {"curry", "Vegetable curry with rice", 65, 12, 16, "img/curry.jpg", MealCategory::Meal, created_at},
      {"fruit", "Apple", 20, 0, 0, "", MealCategory::Snack, created_at},
  };
}

DemoSummary seed_demo(EventStore& store, const DemoOptions& options) {
  if (options.days < 1) throw Error(ErrorCode::ConfigInvalid, "days >= 1");
  if (store.sequence() != 0 || store.latest_reading()) {
    throw Error(ErrorCode::ValidationFailure, "demo data can only be seeded into an empty store");
  }
  const Timestamp end = options.end;
  const Timestamp start = end - std::chrono::days{options.days};
  const PatientSettings settings = store.settings();

  const auto library = demo_meal_library(start);
  for (const auto& profile : library) store.put_meal(profile);
  auto profile = [&](const char* id) -> const MealProfile& {
    for (const auto& p : library) {
      if (p.id == id) return p;
    }
    throw Error(ErrorCode::InvariantViolation, "unknown demo profile");
  };

  DemoRandom rng(options.seed);
  std::vector<PlannedEvent> plan;
  auto meal_with_dose = [&](Timestamp t, const MealProfile& p) {
    plan.push_back({t, MealEventPayload{p.carbs, p.protein, p.fat, 0.0, p.id, p.category}});
    const double units = bolus::round_half_unit(p.carbs / settings.icr);
    if (units > 0.0) plan.push_back({t, InsulinDosePayload{units, DoseSource::Recommended}});
  };

  const Date first_day = day_of(start);
  const Date last_day = day_of(end);
  const int stress_day = options.days >= 3 ? options.days / 2 : -1;
  int index = 0;
  for (Date day = first_day; day <= last_day; day += std::chrono::days{1}, ++index) {
    const Timestamp midnight{day};
    meal_with_dose(midnight + minutes{7 * 60 + rng.between(0, 60)},
                   profile(rng.coin() ? "porridge" : "toast"));
    meal_with_dose(midnight + minutes{12 * 60 + 15 + rng.between(0, 60)},
                   profile(rng.coin() ? "sandwich" : "salad"));
    if (index == stress_day) {
      plan.push_back({midnight + minutes{14 * 60}, HealthFlagPayload{HealthFlag::StressOn}});
    }
    if (rng.coin()) {
      meal_with_dose(midnight + minutes{15 * 60 + 30}, profile("fruit"));
    }
    if (rng.coin()) {
      static constexpr const char* kTypes[] = {"walk", "run", "cycle"};
      plan.push_back({midnight + minutes{17 * 60 + rng.between(0, 30)},
                      ExerciseEventPayload{kTypes[rng.between(0, 2)], rng.between(1, 3),
                                           5.0 * rng.between(6, 12)}});
    }
    meal_with_dose(midnight + minutes{19 * 60 + rng.between(0, 45)},
                   profile(rng.coin() ? "pasta" : "curry"));
    if (index == stress_day) {
      plan.push_back({midnight + minutes{21 * 60}, HealthFlagPayload{HealthFlag::StressOff}});
    }
  }
  std::stable_sort(plan.begin(), plan.end(),
                   [](const PlannedEvent& a, const PlannedEvent& b) { return a.time < b.time; });
  std::erase_if(plan, [&](const PlannedEvent& e) { return e.time < start || e.time > end; });
  // A stress episode cut in half by the window would leave an unmatched flag.
  if (!plan.empty()) {
    if (const auto* f = std::get_if<HealthFlagPayload>(&plan.front().payload);
        f && f->flag == HealthFlag::StressOff) {
      plan.erase(plan.begin());
    }
  }

  CgmSimulatorConfig cgm;
  cgm.seed = options.seed;
  cgm.noise_sd = options.noise_sd;
  cgm.params = options.params;
  std::vector<DiaryEvent> events;
  for (const auto& e : plan) {
    cgm.scenario.push_back({minutes_between(start, e.time), e.payload});
    events.push_back({"", e.time, e.payload});
  }
  const auto readings = simulate_cgm(cgm, start, std::chrono::days{options.days});

  store.append_batch(std::move(events));
  store.append_readings(readings);

  return {start, end, plan.size(), readings.size(), library.size()};
}

}  // namespace glucoscope::store
