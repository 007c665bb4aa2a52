#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

namespace glucoscope::engine {

// Minimal-model glucose/insulin parameters for a typical adult. The JSON form
// uses the conventional short names (p1, G_b, t_maxG, ...); see
// config/model_parameters.json, which must stay identical to these defaults.
struct ModelParameters {
  double glucose_effectiveness = 0.02;     // p1, 1/min
  double remote_insulin_decay = 0.028;     // p2, 1/min
  double insulin_action_gain = 3e-5;       // p3, 1/min per mU/L
  double basal_glucose = 6.5;              // G_b, mmol/L
  double basal_insulin = 10.0;             // I_b, mU/L
  double insulin_elimination = 0.14;       // k_e, 1/min
  double meal_absorption_time = 40.0;      // t_maxG, min
  double insulin_absorption_time = 55.0;   // t_maxI, min
  double glucose_volume = 0.16;            // V_G, L/kg
  double insulin_volume = 0.12;            // V_I, L/kg
  double body_weight = 70.0;               // BW, kg
  double bioavailability = 0.8;            // Bio, (0, 1]
  double exercise_gain = 0.005;            // alpha_ex, 1/min per intensity level
  double stress_factor = 1.5;              // >= 1
  double band_sigma = 0.3;                 // sigma0, mmol/L
  double band_z = 1.96;                    // z

  bool operator==(const ModelParameters&) const = default;
};

// Throws Error(ConfigInvalid).
void validate(const ModelParameters& params);

// Missing keys keep their defaults; unknown keys are rejected.
void to_json(nlohmann::json& j, const ModelParameters& p);
void from_json(const nlohmann::json& j, ModelParameters& p);

ModelParameters load_model_parameters(const std::filesystem::path& file);

}  // namespace glucoscope::engine
