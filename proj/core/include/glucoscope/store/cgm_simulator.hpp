#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "glucoscope/domain/types.hpp"
#include "glucoscope/engine/model_parameters.hpp"
#include "glucoscope/engine/simulator.hpp"

namespace glucoscope::store {

inline constexpr std::chrono::minutes kCgmInterval{5};

struct ScenarioEvent {
  double offset_minutes = 0.0;  // from simulation start
  EventPayload payload;
};

struct CgmSimulatorConfig {
  std::uint64_t seed = 0;
  double noise_sd = 0.0;  // mmol/L, additive Gaussian
  std::optional<engine::SimulationState> start_state;  // basal when absent
  std::vector<ScenarioEvent> scenario;
  engine::ModelParameters params;
};

// Seeded standard normal draws. Box-Muller over raw mt19937_64 output, so the
// sequence does not depend on the standard library's distribution code.
class GaussianNoise {
 public:
  explicit GaussianNoise(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  double uniform();  // (0, 1]
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// Scenario events stamped relative to `start`, ids "scn-000001"..., time-ordered.
std::vector<DiaryEvent> scenario_events(const CgmSimulatorConfig& config, Timestamp start);

// duration / 5 min + 1 readings at exactly 300 s spacing, starting at `start`:
// the engine trajectory driven by the scenario plus seeded noise, clamped into
// the valid reading range. `duration` must be a multiple of 5 minutes.
std::vector<GlucoseReading> simulate_cgm(const CgmSimulatorConfig& config, Timestamp start,
                                         std::chrono::minutes duration);

// Scenario file: {"seed", "noise_sd", "start_state"?, "params"?, "events": [
//   {"offset_minutes", "kind", "payload"}, ...]}
void from_json(const nlohmann::json& j, CgmSimulatorConfig& config);
CgmSimulatorConfig load_scenario(const std::filesystem::path& file);

}  // namespace glucoscope::store
