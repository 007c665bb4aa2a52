#include "glucoscope/engine/predictor.hpp"

#include <algorithm>
#include <cmath>

#include "glucoscope/domain/error.hpp"

namespace glucoscope::engine {

const GlucoseReading& latest_fresh_reading(Timestamp now,
                                           std::span<const GlucoseReading> readings) {
  const auto it = std::upper_bound(
      readings.begin(), readings.end(), now,
      [](Timestamp t, const GlucoseReading& r) { return t < r.timestamp; });
  if (it == readings.begin()) {
    throw Error(ErrorCode::StaleData, "no CGM reading at or before " + format_timestamp(now));
  }
  const GlucoseReading& latest = *std::prev(it);
  if (now - latest.timestamp > kFreshnessWindow) {
    throw Error(ErrorCode::StaleData,
                "latest CGM reading " + format_timestamp(latest.timestamp) + " is older than 15 min");
  }
  return latest;
}

SimulationState state_from_history(Timestamp now, std::span<const GlucoseReading> readings,
                                   std::span<const DiaryEvent> events,
                                   const ModelParameters& params) {
  const GlucoseReading& latest = latest_fresh_reading(now, readings);
  const Timestamp replay_start = now - kReplayWindow;

  ScenarioInputs replay;
  for (const auto& event : events) {
    if (event.timestamp < replay_start || event.timestamp > now) continue;
    if (const auto* meal = event.get_if<MealEventPayload>()) {
      replay.meals.push_back({event.timestamp, meal->carbs});
    } else if (const auto* dose = event.get_if<InsulinDosePayload>()) {
      replay.doses.push_back({event.timestamp, dose->units});
    }
  }

  SimulationState state = basal_state(params);
  if (!replay.meals.empty() || !replay.doses.empty()) {
    const double window = minutes_between(replay_start, now);
    state = simulate(state, params, replay, replay_start, window, 1.0).states.back();
  }
  state.glucose = latest.value;
  return state;
}

double band_half_width(const ModelParameters& params, int step, std::size_t k) {
  return params.band_z * params.band_sigma *
         std::sqrt(static_cast<double>(k) * static_cast<double>(step) / 5.0);
}

PredictionResult predict(Timestamp now, const History& history, const Candidate& candidate,
                         const ModelParameters& params, const PredictOptions& options) {
  if (options.step <= 0 || options.horizon <= 0 || options.horizon % options.step != 0) {
    throw Error(ErrorCode::ConfigInvalid, "step must divide horizon");
  }
  const SimulationState initial =
      state_from_history(now, history.readings, history.events, params);

  ModelParameters anchored = params;
  anchored.basal_glucose = initial.glucose;

  // Past meals and doses already live in the reconstructed compartments; only
  // planned ones (after now) and the candidate enter as impulses. Exercise and
  // flags act for as long as their windows overlap the forecast.
  ScenarioInputs inputs = inputs_from_events(history.events);
  std::erase_if(inputs.meals, [&](const MealInput& m) { return m.time <= now; });
  std::erase_if(inputs.doses, [&](const DoseInput& d) { return d.time <= now; });
  if (candidate.carbs && *candidate.carbs > 0.0) inputs.meals.push_back({now, *candidate.carbs});
  if (candidate.dose && *candidate.dose > 0.0) inputs.doses.push_back({now, *candidate.dose});

  const Trajectory trajectory =
      simulate(initial, anchored, inputs, now, options.horizon, options.dt);

  const double per_step = options.step / options.dt;
  const auto stride = static_cast<std::size_t>(std::llround(per_step));
  if (stride == 0 || std::abs(per_step - static_cast<double>(stride)) > 1e-9) {
    throw Error(ErrorCode::ConfigInvalid, "dt must divide the output step");
  }

  PredictionResult result;
  result.start_time = now;
  result.step = options.step;
  result.horizon = options.horizon;
  const auto count = static_cast<std::size_t>(options.horizon / options.step) + 1;
  result.points.reserve(count);
  result.lower.reserve(count);
  result.upper.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double g = trajectory.states[k * stride].glucose;
    const double hw = band_half_width(params, options.step, k);
    result.points.push_back(g);
    result.lower.push_back(g - hw);
    result.upper.push_back(g + hw);
  }
  return result;
}

}  // namespace glucoscope::engine

namespace glucoscope::engine {

void to_json(nlohmann::json& j, const PredictionResult& p) {
  j = nlohmann::json{{"start_time", format_timestamp(p.start_time)},
                     {"step", p.step},
                     {"horizon", p.horizon},
                     {"points", p.points},
                     {"lower", p.lower},
                     {"upper", p.upper}};
}

void from_json(const nlohmann::json& j, PredictionResult& p) {
  p.start_time = parse_timestamp(j.at("start_time").get<std::string>());
  p.step = j.at("step").get<int>();
  p.horizon = j.at("horizon").get<int>();
  p.points = j.at("points").get<std::vector<double>>();
  p.lower = j.at("lower").get<std::vector<double>>();
  p.upper = j.at("upper").get<std::vector<double>>();
}

}  // namespace glucoscope::engine
