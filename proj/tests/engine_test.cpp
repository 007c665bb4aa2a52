#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "glucoscope/domain/error.hpp"
#include "glucoscope/engine/model_parameters.hpp"
#include "glucoscope/engine/predictor.hpp"
#include "glucoscope/engine/simulator.hpp"

using namespace glucoscope;
using namespace glucoscope::engine;
using namespace std::chrono_literals;

namespace {

const Timestamp t0 = parse_timestamp("2024-03-01T12:00:00Z");
const ModelParameters params;

// Reference values from tests/oracles/minimal_model_reference.py (SciPy
// DOP853, rtol = atol = 1e-12), sampled every 5 min from the meal/dose time.
constexpr std::array<double, 25> kBolus4 = {
    6.5000000000, 6.4993583652, 6.4916935468, 6.4657629445, 6.4114988697, 6.3227145098,
    6.1977074214, 6.0387972969, 5.8513477089, 5.6426131840, 5.4206374294, 5.1933410982,
    4.9678638023, 4.7501670050, 4.5448652052, 4.3552324316, 4.1833261534, 4.0301762684,
    3.8959978342, 3.7803987013, 3.6825646187, 3.6014134600, 3.5357166278, 3.4841897045,
    3.4455565276};
constexpr std::array<double, 25> kMeal40Bolus4 = {
    6.5000000000, 6.6096098093, 6.8838423990, 7.2488421772, 7.6431987325, 8.0186356775,
    8.3399607266, 8.5844361317, 8.7405174731, 8.8060342740, 8.7860216497, 8.6904687466,
    8.5322272599, 8.3252522228, 8.0832610292, 7.8188199266, 7.5428126895, 7.2642164169,
    6.9901005776, 6.7257710647, 6.4749945433, 6.2402546106, 6.0230067872, 5.8239123509,
    5.6430408645};
constexpr double kMeal40PeakTime = 86.0;
constexpr double kMeal40Peak = 11.4535649641;
constexpr double kMeal40At60 = 10.9108612691;
constexpr double kMeal40At120 = 10.8845508103;
constexpr double kMeal40ExerciseAt60 = 9.0805370011;
constexpr double kMeal40ExerciseAt120 = 9.4708604802;

// RK4 at dt = 1 min against the adaptive reference.
constexpr double kOracleTol = 1e-4;

ScenarioInputs meal_and_dose(double carbs, double units, Timestamp at = t0) {
  ScenarioInputs in;
  if (carbs > 0) in.meals.push_back({at, carbs});
  if (units > 0) in.doses.push_back({at, units});
  return in;
}

std::vector<double> glucose(const ScenarioInputs& in, double horizon = 120, double dt = 1.0) {
  return simulate(basal_state(params), params, in, t0, horizon, dt).glucose();
}

DiaryEvent event(std::string id, Timestamp t, EventPayload p) { return {std::move(id), t, std::move(p)}; }

}  // namespace

TEST(Simulator, EquilibriumHoldsForADay) {
  auto g = glucose({}, 24 * 60);
  ASSERT_EQ(g.size(), 24u * 60 + 1);
  for (double v : g) ASSERT_NEAR(v, params.basal_glucose, 1e-6);
  auto last = simulate(basal_state(params), params, {}, t0, 24 * 60).states.back();
  EXPECT_NEAR(last.plasma_insulin, params.basal_insulin, 1e-9);
  EXPECT_NEAR(last.insulin_action, 0.0, 1e-12);
}

TEST(Simulator, MealPeakMatchesReference) {
  auto g = glucose(meal_and_dose(40, 0), 240);
  auto peak = std::max_element(g.begin(), g.end());
  double peak_time = static_cast<double>(peak - g.begin());
  EXPECT_GT(peak_time, 15.0);
  EXPECT_LT(peak_time, 120.0);
  EXPECT_EQ(peak_time, kMeal40PeakTime);
  EXPECT_NEAR(*peak, kMeal40Peak, kOracleTol);
  EXPECT_NEAR(g[60], kMeal40At60, kOracleTol);
  EXPECT_NEAR(g[120], kMeal40At120, kOracleTol);
  EXPECT_GT(*peak, params.basal_glucose);
  // Heading back toward basal by the end of the window.
  EXPECT_LT(g[240], g[120]);
}

TEST(Simulator, BolusAloneDecreasesMonotonically) {
  auto g = glucose(meal_and_dose(0, 4));
  for (std::size_t i = 1; i < g.size(); ++i) {
    ASSERT_LE(g[i], g[i - 1] + 1e-12) << "minute " << i;
    ASSERT_LT(g[i], params.basal_glucose) << "minute " << i;
  }
  for (std::size_t k = 0; k < kBolus4.size(); ++k) EXPECT_NEAR(g[5 * k], kBolus4[k], kOracleTol);
}

TEST(Simulator, MealWithBolusMatchesReference) {
  auto g = glucose(meal_and_dose(40, 4));
  for (std::size_t k = 0; k < kMeal40Bolus4.size(); ++k) {
    EXPECT_NEAR(g[5 * k], kMeal40Bolus4[k], kOracleTol) << "minute " << 5 * k;
  }
}

TEST(Simulator, ExerciseWithTailMatchesReference) {
  auto in = meal_and_dose(40, 0);
  in.exercises.push_back({t0 + 10min, 30, 2});
  auto g = glucose(in);
  EXPECT_NEAR(g[60], kMeal40ExerciseAt60, kOracleTol);
  EXPECT_NEAR(g[120], kMeal40ExerciseAt120, kOracleTol);
  EXPECT_LT(g[120], glucose(meal_and_dose(40, 0))[120]);
}

TEST(Simulator, StepRefinementConverges) {
  auto in = meal_and_dose(40, 4);
  in.exercises.push_back({t0 + 17min + 30s, 25, 3});
  auto coarse = glucose(in, 120, 1.0);
  auto fine = glucose(in, 120, 0.01);
  double worst = 0;
  for (std::size_t i = 0; i < coarse.size(); ++i) worst = std::max(worst, std::abs(coarse[i] - fine[i * 100]));
  EXPECT_LT(worst, 0.01);
  EXPECT_LT(worst, 1e-4);
}

TEST(Simulator, ClosedFormSubcutaneousCompartments) {
  const double tau = params.insulin_absorption_time;
  auto tr = simulate(basal_state(params), params, meal_and_dose(0, 4), t0, 180);
  for (int t : {0, 1, 30, 55, 120, 180}) {
    const auto& s = tr.states[static_cast<std::size_t>(t)];
    EXPECT_NEAR(s.subcut1, 4 * std::exp(-t / tau), 1e-6) << t;
    EXPECT_NEAR(s.subcut2, 4 * (t / tau) * std::exp(-t / tau), 1e-6) << t;
  }
}

TEST(Simulator, ImpulseTiming) {
  // A dose landing mid-step is split out exactly; one before start is ignored.
  ScenarioInputs in;
  in.doses.push_back({t0 + 30s, 2});
  in.doses.push_back({t0 - 1min, 10});
  auto tr = simulate(basal_state(params), params, in, t0, 10);
  EXPECT_EQ(tr.states[0].subcut1, 0.0);
  const double tau = params.insulin_absorption_time;
  EXPECT_NEAR(tr.states[10].subcut1, 2 * std::exp(-9.5 / tau), 1e-8);

  ScenarioInputs at_start;
  at_start.meals.push_back({t0, 30});
  EXPECT_DOUBLE_EQ(simulate(basal_state(params), params, at_start, t0, 5).states[0].gut1,
                   30 * params.bioavailability);
}

TEST(Simulator, NonnegativeAndDeterministic) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> carbs(0, 150), units(0, 15), when(0, 180);
  for (int i = 0; i < 30; ++i) {
    ScenarioInputs in;
    for (int k = 0; k < 3; ++k) {
      in.meals.push_back({t0 + std::chrono::seconds{static_cast<long>(when(rng) * 60)}, carbs(rng)});
      in.doses.push_back({t0 + std::chrono::seconds{static_cast<long>(when(rng) * 60)}, units(rng)});
    }
    auto a = simulate(basal_state(params), params, in, t0, 240);
    auto b = simulate(basal_state(params), params, in, t0, 240);
    ASSERT_EQ(a.states, b.states);
    for (const auto& s : a.states) {
      ASSERT_GT(s.glucose, 0.0);
      ASSERT_GE(s.gut1, 0.0);
      ASSERT_GE(s.gut2, 0.0);
      ASSERT_GE(s.subcut1, 0.0);
      ASSERT_GE(s.subcut2, 0.0);
      ASSERT_GE(s.plasma_insulin, 0.0);
    }
  }
}

TEST(Simulator, RandomizedMonotonicity) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> carbs(0, 120), units(0, 10), onset(0, 60), extra(0.5, 60);
  for (int i = 0; i < 40; ++i) {
    const auto at = t0 + std::chrono::minutes{static_cast<long>(onset(rng))};
    const double c = carbs(rng), u = units(rng), dc = extra(rng), du = extra(rng) / 6;
    auto base = glucose(meal_and_dose(c, u, at));
    auto more_carbs = glucose(meal_and_dose(c + dc, u, at));
    auto more_insulin = glucose(meal_and_dose(c, u + du, at));
    for (std::size_t k = 0; k < base.size(); ++k) {
      ASSERT_GE(more_carbs[k], base[k] - 1e-9);
      ASSERT_LE(more_insulin[k], base[k] + 1e-9);
    }
    // Strict once the extra input has had time to act.
    EXPECT_GT(more_carbs.back(), base.back());
    EXPECT_LT(more_insulin.back(), base.back());
  }
}

TEST(Simulator, StressScalesGlucoseEffectiveness) {
  ScenarioInputs stressed = meal_and_dose(40, 4);
  stressed.flags.push_back({t0 - 1h, std::nullopt});
  auto scaled = params;
  scaled.glucose_effectiveness *= params.stress_factor;
  auto a = glucose(stressed);
  auto b = simulate(basal_state(scaled), scaled, meal_and_dose(40, 4), t0, 120).glucose();
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-12);

  // A flag that ends halfway only changes the second half through its effect on the first.
  ScenarioInputs half = meal_and_dose(40, 4);
  half.flags.push_back({t0, t0 + 60min});
  auto h = glucose(half);
  EXPECT_NEAR(h[60], a[60], 1e-12);
  EXPECT_NE(h[120], a[120]);
}

TEST(Simulator, RejectsBadConfiguration) {
  try {
    simulate(basal_state(params), params, {}, t0, 120, 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid);
  }
  auto bad = basal_state(params);
  bad.glucose = -1;
  try {
    simulate(bad, params, {}, t0, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvariantViolation);
  }
  auto runaway = params;
  runaway.glucose_effectiveness = -50;
  try {
    simulate(basal_state(runaway), runaway, {}, t0, 600);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid);
  }
  ScenarioInputs flood;
  for (int i = 0; i < 4; ++i) flood.meals.push_back({t0, 1e308});
  try {
    simulate(basal_state(params), params, flood, t0, 600);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteState);
  }
}

TEST(Simulator, InputsFromEventsPairsFlags) {
  std::vector<DiaryEvent> log{
      event("a", t0, MealEventPayload{30}),
      event("b", t0, InsulinDosePayload{3, DoseSource::Manual}),
      event("c", t0 + 1h, HealthFlagPayload{HealthFlag::StressOn}),
      event("d", t0 + 2h, ExerciseEventPayload{"walk", 1, 20}),
      event("e", t0 + 3h, HealthFlagPayload{HealthFlag::StressOff}),
      event("f", t0 + 4h, HealthFlagPayload{HealthFlag::IllnessOn}),
  };
  auto in = inputs_from_events(log);
  ASSERT_EQ(in.meals.size(), 1u);
  ASSERT_EQ(in.doses.size(), 1u);
  ASSERT_EQ(in.exercises.size(), 1u);
  ASSERT_EQ(in.flags.size(), 2u);
  EXPECT_EQ(in.flags[0].start, t0 + 1h);
  EXPECT_EQ(in.flags[0].end, t0 + 3h);
  EXPECT_EQ(in.flags[1].start, t0 + 4h);
  EXPECT_FALSE(in.flags[1].end.has_value());
}

TEST(Parameters, ConfigFileEqualsDefaults) {
  auto loaded = load_model_parameters(GLUCOSCOPE_SOURCE_DIR "/config/model_parameters.json");
  EXPECT_EQ(loaded, ModelParameters{});
  nlohmann::json j = ModelParameters{};
  EXPECT_EQ(j.get<ModelParameters>(), ModelParameters{});
}

TEST(Parameters, Validation) {
  nlohmann::json j = {{"p1", -0.1}};
  EXPECT_THROW(validate(j.get<ModelParameters>()), Error);
  nlohmann::json unknown = {{"p7", 1.0}};
  try {
    unknown.get<ModelParameters>();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid);
  }
  nlohmann::json partial = {{"BW", 80.0}};
  EXPECT_EQ(partial.get<ModelParameters>().body_weight, 80.0);
}

TEST(StateFromHistory, EmptyHistory) {
  std::vector<GlucoseReading> readings{{t0 - 2min, 8.2}};
  auto s = state_from_history(t0, readings, {}, params);
  EXPECT_EQ(s, (SimulationState{8.2, 0, params.basal_insulin, 0, 0, 0, 0}));
}

TEST(StateFromHistory, BolusResidualMatchesClosedForm) {
  std::vector<GlucoseReading> readings{{t0, 6.5}};
  std::vector<DiaryEvent> log{event("d", t0 - 2h, InsulinDosePayload{4, DoseSource::Manual})};
  auto s = state_from_history(t0, readings, log, params);
  const double x = 120.0 / params.insulin_absorption_time;
  EXPECT_NEAR(s.subcut1 + s.subcut2, 4 * std::exp(-x) * (1 + x), 1e-6);
  EXPECT_GT(s.insulin_action, 0.0);
}

TEST(StateFromHistory, ReplayWindowBoundary) {
  std::vector<GlucoseReading> readings{{t0, 6.5}};
  std::vector<DiaryEvent> outside{event("m", t0 - 8h - 1min, MealEventPayload{60})};
  auto s = state_from_history(t0, readings, outside, params);
  EXPECT_EQ(s.gut1, 0.0);
  EXPECT_EQ(s.gut2, 0.0);
  std::vector<DiaryEvent> inside{event("m", t0 - 8h, MealEventPayload{60})};
  EXPECT_GT(state_from_history(t0, readings, inside, params).gut2, 0.0);
}

TEST(Predict, StaleData) {
  std::vector<GlucoseReading> old{{t0 - 16min, 6.0}};
  try {
    predict(t0, {old, {}}, {}, params);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StaleData);
  }
  std::vector<GlucoseReading> future{{t0 + 1min, 6.0}};
  EXPECT_THROW(predict(t0, {future, {}}, {}, params), Error);
  std::vector<GlucoseReading> edge{{t0 - 15min, 6.0}};
  EXPECT_NO_THROW(predict(t0, {edge, {}}, {}, params));
}

TEST(Predict, QuiescentIsFlatWithWideningBand) {
  for (double g : {6.5, 4.2, 13.0}) {
    std::vector<GlucoseReading> readings{{t0, g}};
    auto p = predict(t0, {readings, {}}, {}, params);
    ASSERT_EQ(p.points.size(), 25u);
    EXPECT_EQ(p.time_at(24), t0 + 120min);
    double prev = -1;
    for (std::size_t k = 0; k < 25; ++k) {
      EXPECT_NEAR(p.points[k], g, 1e-9);
      const double width = p.upper[k] - p.lower[k];
      EXPECT_GE(width, prev);
      prev = width;
    }
    EXPECT_EQ(p.upper[0] - p.lower[0], 0.0);
    EXPECT_NEAR(p.upper[1] - p.points[1], 1.96 * 0.3, 1e-12);
    EXPECT_NEAR(p.upper[24] - p.points[24], 1.96 * 0.3 * std::sqrt(24.0), 1e-12);
  }
}

TEST(Predict, CandidateMatchesSimulateAndReference) {
  std::vector<GlucoseReading> readings{{t0, 6.5}};
  auto p = predict(t0, {readings, {}}, {40.0, 4.0}, params);
  auto g = glucose(meal_and_dose(40, 4));
  for (std::size_t k = 0; k < 25; ++k) {
    EXPECT_DOUBLE_EQ(p.points[k], g[5 * k]);
    EXPECT_NEAR(p.points[k], kMeal40Bolus4[k], kOracleTol);
  }
  auto peak = std::max_element(p.points.begin(), p.points.end());
  EXPECT_GT(*peak, p.points.front());
  EXPECT_GT(*peak, p.points.back());
}

TEST(Predict, PastInputsComeFromReplayOnly) {
  // A dose an hour ago lowers the forecast; it must not be applied twice.
  std::vector<GlucoseReading> readings{{t0, 6.5}};
  std::vector<DiaryEvent> log{event("d", t0 - 1h, InsulinDosePayload{4, DoseSource::Manual})};
  auto with = predict(t0, {readings, log}, {}, params);
  auto replayed = state_from_history(t0, readings, log, params);
  auto anchored = params;
  anchored.basal_glucose = 6.5;
  auto expect = simulate(replayed, anchored, {}, t0, 120).glucose();
  for (std::size_t k = 0; k < 25; ++k) EXPECT_DOUBLE_EQ(with.points[k], expect[5 * k]);
  EXPECT_LT(with.points.back(), 6.5);
}

TEST(Predict, JsonShape) {
  std::vector<GlucoseReading> readings{{t0, 6.5}};
  auto p = predict(t0, {readings, {}}, {40.0, std::nullopt}, params);
  nlohmann::json j = p;
  EXPECT_EQ(j["points"].size(), 25u);
  EXPECT_EQ(j["step"], 5);
  EXPECT_EQ(j["horizon"], 120);
  EXPECT_EQ(j.get<PredictionResult>(), p);
}
