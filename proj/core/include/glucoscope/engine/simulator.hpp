#pragma once

#include <optional>
#include <span>
#include <vector>

#include "glucoscope/domain/types.hpp"
#include "glucoscope/engine/model_parameters.hpp"

namespace glucoscope::engine {

// Grams of absorbed carbohydrate to mmol of glucose.
inline constexpr double kMmolPerGramGlucose = 1000.0 / 180.156;
// Exercise keeps acting at half gain for an hour after it ends.
inline constexpr double kExerciseTailMinutes = 60.0;
inline constexpr double kExerciseTailGain = 0.5;

struct SimulationState {
  double glucose = 0.0;         // G, mmol/L
  double insulin_action = 0.0;  // X, 1/min
  double plasma_insulin = 0.0;  // I, mU/L
  double gut1 = 0.0;            // D1, g
  double gut2 = 0.0;            // D2, g
  double subcut1 = 0.0;         // S1, U
  double subcut2 = 0.0;         // S2, U

  bool operator==(const SimulationState&) const = default;
};

// JSON keys follow the conventional state names: G, X, I, D1, D2, S1, S2.
void to_json(nlohmann::json& j, const SimulationState& s);
void from_json(const nlohmann::json& j, SimulationState& s);

// (G_b, 0, I_b, 0, 0, 0, 0): the zero-input equilibrium.
SimulationState basal_state(const ModelParameters& params);

// G > 0, compartments >= 0, everything finite. Throws InvariantViolation.
void validate(const SimulationState& state);

struct MealInput {
  Timestamp time;
  double carbs = 0.0;
};

struct DoseInput {
  Timestamp time;
  double units = 0.0;
};

struct ExerciseInput {
  Timestamp start;
  double duration = 0.0;  // minutes
  int intensity = 1;
};

// A stress or illness period; open-ended while the flag is still on.
struct FlagInterval {
  Timestamp start;
  std::optional<Timestamp> end;
};

struct ScenarioInputs {
  std::vector<MealInput> meals;
  std::vector<DoseInput> doses;
  std::vector<ExerciseInput> exercises;
  std::vector<FlagInterval> flags;
};

// Meals, doses and exercise map one-to-one; stress and illness flags are
// paired into intervals per kind.
ScenarioInputs inputs_from_events(std::span<const DiaryEvent> events);

struct Trajectory {
  Timestamp start;
  double dt = 1.0;  // minutes
  std::vector<SimulationState> states;

  std::vector<double> glucose() const;
};

// Integrates the minimal model with classical RK4 at fixed step `dt_minutes`
// over [start, start + horizon]. Meals and doses are impulses into the first
// gut / subcutaneous compartment; the state at time t includes every impulse
// at or before t, and impulses before `start` are ignored. Steps are split at
// impulse times and at exercise/flag boundaries so forcing is piecewise
// constant inside every RK4 sub-step.
//
// Returns horizon/dt + 1 states. Throws ConfigInvalid when dt does not divide
// the horizon, InvariantViolation for a bad initial state and NonFiniteState
// if the integration blows up.
Trajectory simulate(const SimulationState& initial, const ModelParameters& params,
                    const ScenarioInputs& inputs, Timestamp start, double horizon_minutes,
                    double dt_minutes = 1.0);

}  // namespace glucoscope::engine
