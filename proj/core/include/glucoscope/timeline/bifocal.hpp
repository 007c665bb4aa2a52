#pragma once

#include <chrono>
#include <span>
#include <vector>

#include "glucoscope/domain/time.hpp"

namespace glucoscope::timeline {

// Sub-second times for the continuous time <-> x transform.
using SpanTime = std::chrono::sys_time<std::chrono::duration<double>>;

struct BifocalConfig {
  double focus_fraction = 0.6;
  int context_days_per_side = 4;
  double width = 1.0;
};

// Throws Error(ConfigInvalid).
void validate(const BifocalConfig& config);

enum class SegmentKind { Context, Focus };

struct DaySegment {
  Date day;
  double x_start = 0.0;
  double x_end = 0.0;
  SegmentKind kind = SegmentKind::Context;

  double width() const { return x_end - x_start; }
};

// Two-slope bifocal geometry: the focal day is shown undistorted across
// focus_fraction of the width, and the context days on either side share the
// rest equally. The map from time to x is piecewise linear, continuous and
// strictly increasing over the visible span.
class BifocalLayout {
 public:
  BifocalLayout(Date focal_day, const BifocalConfig& config);

  Date focal_day() const { return focal_day_; }
  const BifocalConfig& config() const { return config_; }
  std::span<const DaySegment> segments() const { return segments_; }
  const DaySegment& focus() const { return segments_[focus_index_]; }

  Timestamp span_start() const { return Timestamp{segments_.front().day}; }
  Timestamp span_end() const { return Timestamp{segments_.back().day + std::chrono::days{1}}; }
  bool visible(Timestamp t) const { return t >= span_start() && t < span_end(); }

  // Both throw Error(OutOfSpan) outside [span_start, span_end] / [0, width].
  double time_to_x(SpanTime t) const;
  SpanTime x_to_time(double x) const;

  BifocalLayout scrolled(int days) const { return {focal_day_ + std::chrono::days{days}, config_}; }

  bool operator==(const BifocalLayout& other) const;

 private:
  Date focal_day_;
  BifocalConfig config_;
  std::vector<DaySegment> segments_;
  std::size_t focus_index_ = 0;
};

inline BifocalLayout layout(Date focal_day, const BifocalConfig& config = {}) {
  return {focal_day, config};
}

// Day offset the diary settles on after a scroll gesture: the nearest whole
// day, exact halves rounding toward zero so a release at the midpoint does not
// overshoot.
int snap_target(double scroll_day_offset);

}  // namespace glucoscope::timeline
