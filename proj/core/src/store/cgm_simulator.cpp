#include "glucoscope/store/cgm_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "glucoscope/domain/error.hpp"
#include "glucoscope/domain/serialization.hpp"
#include "glucoscope/domain/validation.hpp"

namespace glucoscope::store {

double GaussianNoise::uniform() {
  // 53 random mantissa bits, shifted off zero so log() stays finite.
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianNoise::next() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

std::vector<DiaryEvent> scenario_events(const CgmSimulatorConfig& config, Timestamp start) {
  std::vector<ScenarioEvent> ordered = config.scenario;
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return a.offset_minutes < b.offset_minutes;
  });
  std::vector<DiaryEvent> events;
  events.reserve(ordered.size());
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "scn-%06zu", i + 1);
    const auto offset = std::chrono::seconds{std::llround(ordered[i].offset_minutes * 60.0)};
    events.push_back({id, start + offset, ordered[i].payload});
  }
  return events;
}

std::vector<GlucoseReading> simulate_cgm(const CgmSimulatorConfig& config, Timestamp start,
                                         std::chrono::minutes duration) {
  if (duration.count() < 0 || duration.count() % kCgmInterval.count() != 0) {
    throw Error(ErrorCode::ConfigInvalid, "duration must be a non-negative multiple of 5 min");
  }
  if (!(config.noise_sd >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "noise_sd >= 0");

  const auto events = scenario_events(config, start);
  const auto inputs = engine::inputs_from_events(events);
  const auto initial = config.start_state.value_or(engine::basal_state(config.params));
  const auto trajectory = engine::simulate(initial, config.params, inputs, start,
                                           static_cast<double>(duration.count()), 1.0);

  GaussianNoise noise(config.seed);
  const auto stride = static_cast<std::size_t>(kCgmInterval.count());
  const auto count = static_cast<std::size_t>(duration / kCgmInterval) + 1;
  std::vector<GlucoseReading> readings;
  readings.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    double value = trajectory.states[k * stride].glucose;
    if (config.noise_sd > 0.0) value += config.noise_sd * noise.next();
    value = std::clamp(value, 0.1, kMaxGlucose);
    readings.push_back({start + kCgmInterval * static_cast<long>(k), value});
  }
  return readings;
}

void from_json(const nlohmann::json& j, CgmSimulatorConfig& c) {
  c.seed = j.value("seed", std::uint64_t{0});
  c.noise_sd = j.value("noise_sd", 0.0);
  if (j.contains("params")) engine::from_json(j.at("params"), c.params);
  engine::validate(c.params);
  c.start_state.reset();
  if (j.contains("start_state")) {
    c.start_state = j.at("start_state").get<engine::SimulationState>();
    engine::validate(*c.start_state);
  }
  c.scenario.clear();
  for (const auto& item : j.value("events", nlohmann::json::array())) {
    // Reuse the diary event decoder for the kind/payload pair.
    nlohmann::json as_event = {{"timestamp", "1970-01-01T00:00:00Z"},
                               {"kind", item.at("kind")},
                               {"payload", item.at("payload")}};
    const auto event = as_event.get<DiaryEvent>();
    validate_payload(event.payload);
    c.scenario.push_back({item.at("offset_minutes").get<double>(), event.payload});
  }
}

CgmSimulatorConfig load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open " + file.string());
  try {
    return nlohmann::json::parse(in).get<CgmSimulatorConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, file.string() + ": " + e.what());
  }
}

}  // namespace glucoscope::store
