#include "glucoscope/domain/settings.hpp"

#include <cmath>

#include "glucoscope/domain/error.hpp"

namespace glucoscope {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvariantViolation, what);
}

}  // namespace

void validate(const PatientSettings& s) {
  require(std::isfinite(s.icr) && s.icr > 0.0, "icr > 0");
  require(std::isfinite(s.isf) && s.isf > 0.0, "isf > 0");
  require(std::isfinite(s.dia) && s.dia > 0.0, "dia > 0");
  require(std::isfinite(s.g_target) && std::isfinite(s.hypo_threshold) &&
              std::isfinite(s.hyper_threshold) && std::isfinite(s.alert_low) &&
              std::isfinite(s.alert_high),
          "glucose thresholds finite");
  require(s.hypo_threshold > 0.0, "hypo_threshold > 0");
  require(s.hypo_threshold < s.g_target, "hypo_threshold < g_target");
  require(s.g_target < s.hyper_threshold, "g_target < hyper_threshold");
  require(s.alert_low > 0.0, "alert_low > 0");
  require(s.alert_low < s.alert_high, "alert_low < alert_high");
}

}  // namespace glucoscope
