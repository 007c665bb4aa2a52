#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <vector>

#include "glucoscope/domain/types.hpp"
#include "glucoscope/engine/model_parameters.hpp"
#include "glucoscope/engine/simulator.hpp"

namespace glucoscope::engine {

// A forecast needs a CGM reading at most this old.
inline constexpr std::chrono::minutes kFreshnessWindow{15};
// Events older than this no longer influence the reconstructed state.
inline constexpr std::chrono::hours kReplayWindow{8};

struct PredictionResult {
  Timestamp start_time;
  int step = 5;       // minutes
  int horizon = 120;  // minutes
  std::vector<double> points;
  std::vector<double> lower;
  std::vector<double> upper;

  Timestamp time_at(std::size_t k) const {
    return start_time + std::chrono::minutes{static_cast<long>(k) * step};
  }

  bool operator==(const PredictionResult&) const = default;
};

// A hypothetical meal and/or dose taken at the prediction time.
struct Candidate {
  std::optional<double> carbs;
  std::optional<double> dose;
};

struct History {
  std::span<const GlucoseReading> readings;  // time-ordered
  std::span<const DiaryEvent> events;        // time-ordered
};

struct PredictOptions {
  int step = 5;
  int horizon = 120;
  double dt = 1.0;
};

// Latest reading at or before `now`; StaleData if none within the freshness window.
const GlucoseReading& latest_fresh_reading(Timestamp now, std::span<const GlucoseReading> readings);

// G from the latest reading; insulin action, plasma insulin and the absorption
// compartments from replaying meals and doses of the last 8 h from basal.
SimulationState state_from_history(Timestamp now, std::span<const GlucoseReading> readings,
                                   std::span<const DiaryEvent> events,
                                   const ModelParameters& params);

// Forecast from `now`. Basal glucose is anchored at the latest reading, so with
// no active inputs the forecast is flat. Band half-width is
// z * sigma0 * sqrt(k * step / 5).
PredictionResult predict(Timestamp now, const History& history, const Candidate& candidate,
                         const ModelParameters& params, const PredictOptions& options = {});

double band_half_width(const ModelParameters& params, int step, std::size_t k);

}  // namespace glucoscope::engine

namespace glucoscope::engine {

// {"start_time", "step", "horizon", "points", "lower", "upper"}
void to_json(nlohmann::json& j, const PredictionResult& p);
void from_json(const nlohmann::json& j, PredictionResult& p);

}  // namespace glucoscope::engine
