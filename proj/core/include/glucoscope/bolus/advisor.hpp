#pragma once

#include <span>

#include "glucoscope/domain/settings.hpp"

namespace glucoscope::bolus {

struct PriorDose {
  double units = 0.0;
  double age_minutes = 0.0;  // >= 0
};

struct BolusBreakdown {
  double meal_component = 0.0;
  double correction_component = 0.0;  // negative below target
  double iob_deduction = 0.0;
  double total = 0.0;  // >= 0, multiple of 0.5

  bool operator==(const BolusBreakdown&) const = default;
};

// Linear decay: each dose contributes units * max(0, 1 - age / dia).
// Negative ages are a caller bug and throw std::invalid_argument.
double insulin_on_board(std::span<const PriorDose> prior_doses, double dia_minutes);

// Nearest multiple of 0.5 U, ties rounding up (0.25 -> 0.5, 0.75 -> 1.0).
double round_half_unit(double units);

// meal = carbs / icr, correction = (glucose - g_target) / isf, minus IOB;
// the total is rounded to 0.5 U and clamped at zero.
BolusBreakdown recommend(double carbs, double current_glucose, const PatientSettings& settings,
                         std::span<const PriorDose> prior_doses);

}  // namespace glucoscope::bolus
