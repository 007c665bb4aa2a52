#include "glucoscope/engine/model_parameters.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <string_view>
#include <utility>

#include "glucoscope/domain/error.hpp"

namespace glucoscope::engine {
namespace {

using Field = std::pair<std::string_view, double ModelParameters::*>;

constexpr std::array<Field, 16> kFields{{
    {"p1", &ModelParameters::glucose_effectiveness},
    {"p2", &ModelParameters::remote_insulin_decay},
    {"p3", &ModelParameters::insulin_action_gain},
    {"G_b", &ModelParameters::basal_glucose},
    {"I_b", &ModelParameters::basal_insulin},
    {"k_e", &ModelParameters::insulin_elimination},
    {"t_maxG", &ModelParameters::meal_absorption_time},
    {"t_maxI", &ModelParameters::insulin_absorption_time},
    {"V_G", &ModelParameters::glucose_volume},
    {"V_I", &ModelParameters::insulin_volume},
    {"BW", &ModelParameters::body_weight},
    {"Bio", &ModelParameters::bioavailability},
    {"alpha_ex", &ModelParameters::exercise_gain},
    {"stress_factor", &ModelParameters::stress_factor},
    {"sigma0", &ModelParameters::band_sigma},
    {"z", &ModelParameters::band_z},
}};

}  // namespace

void validate(const ModelParameters& p) {
  for (const auto& [name, member] : kFields) {
    if (!std::isfinite(p.*member)) {
      throw Error(ErrorCode::ConfigInvalid, std::string(name) + " finite");
    }
  }
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw Error(ErrorCode::ConfigInvalid, std::string(what) + " > 0");
  };
  positive(p.glucose_effectiveness, "p1");
  positive(p.remote_insulin_decay, "p2");
  positive(p.insulin_action_gain, "p3");
  positive(p.basal_glucose, "G_b");
  positive(p.insulin_elimination, "k_e");
  positive(p.meal_absorption_time, "t_maxG");
  positive(p.insulin_absorption_time, "t_maxI");
  positive(p.glucose_volume, "V_G");
  positive(p.insulin_volume, "V_I");
  positive(p.body_weight, "BW");
  positive(p.bioavailability, "Bio");
  if (p.basal_insulin < 0.0) throw Error(ErrorCode::ConfigInvalid, "I_b >= 0");
  if (p.bioavailability > 1.0) throw Error(ErrorCode::ConfigInvalid, "Bio <= 1");
  if (p.exercise_gain < 0.0) throw Error(ErrorCode::ConfigInvalid, "alpha_ex >= 0");
  if (p.stress_factor < 1.0) throw Error(ErrorCode::ConfigInvalid, "stress_factor >= 1");
  if (p.band_sigma < 0.0) throw Error(ErrorCode::ConfigInvalid, "sigma0 >= 0");
  if (p.band_z < 0.0) throw Error(ErrorCode::ConfigInvalid, "z >= 0");
}

void to_json(nlohmann::json& j, const ModelParameters& p) {
  j = nlohmann::json::object();
  for (const auto& [name, member] : kFields) j[std::string(name)] = p.*member;
}

void from_json(const nlohmann::json& j, ModelParameters& p) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "parameters must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& [name, member] : kFields) {
      if (key == name) {
        p.*member = value.get<double>();
        known = true;
        break;
      }
    }
    if (!known) throw Error(ErrorCode::ConfigInvalid, "unknown parameter '" + key + "'");
  }
}

ModelParameters load_model_parameters(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open " + file.string());
  ModelParameters params;
  try {
    from_json(nlohmann::json::parse(in), params);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, file.string() + ": " + e.what());
  }
  validate(params);
  return params;
}

}  // namespace glucoscope::engine
