#include "glucoscope/bolus/advisor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace glucoscope::bolus {

double insulin_on_board(std::span<const PriorDose> prior_doses, double dia_minutes) {
  if (!(dia_minutes > 0.0)) throw std::invalid_argument("dia must be positive");
  double iob = 0.0;
  for (const auto& dose : prior_doses) {
    if (dose.age_minutes < 0.0) throw std::invalid_argument("dose age must be >= 0");
    iob += dose.units * std::max(0.0, 1.0 - dose.age_minutes / dia_minutes);
  }
  return iob;
}

double round_half_unit(double units) {
  // The 1e-9 nudge keeps decimal ties such as 0.1 * 7.5 from rounding down.
  return std::floor(units * 2.0 + 0.5 + 1e-9) / 2.0;
}

BolusBreakdown recommend(double carbs, double current_glucose, const PatientSettings& settings,
                         std::span<const PriorDose> prior_doses) {
  if (!(carbs >= 0.0)) throw std::invalid_argument("carbs must be >= 0");
  if (!(current_glucose > 0.0)) throw std::invalid_argument("glucose must be > 0");
  BolusBreakdown b;
  b.meal_component = carbs / settings.icr;
  b.correction_component = (current_glucose - settings.g_target) / settings.isf;
  b.iob_deduction = insulin_on_board(prior_doses, settings.dia);
  b.total = std::max(0.0, round_half_unit(b.meal_component + b.correction_component -
                                          b.iob_deduction));
  return b;
}

}  // namespace glucoscope::bolus
