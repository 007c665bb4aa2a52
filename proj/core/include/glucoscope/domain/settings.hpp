#pragma once

namespace glucoscope {

struct GlycemicThresholds {
  double hypo = 3.9;
  double hyper = 10.0;
};

struct PatientSettings {
  double icr = 10.0;             // grams of carbohydrate per unit
  double isf = 3.0;              // mmol/L drop per unit
  double g_target = 6.5;         // mmol/L
  double dia = 240.0;            // minutes
  double hypo_threshold = 3.9;   // mmol/L
  double hyper_threshold = 10.0; // mmol/L
  double alert_low = 3.9;
  double alert_high = 10.0;

  GlycemicThresholds thresholds() const { return {hypo_threshold, hyper_threshold}; }

  bool operator==(const PatientSettings&) const = default;
};

// Throws Error(InvariantViolation) naming the first failed constraint.
void validate(const PatientSettings& settings);

}  // namespace glucoscope
