#include "glucoscope/timeline/bifocal.hpp"

#include <algorithm>
#include <cmath>

#include "glucoscope/domain/error.hpp"

namespace glucoscope::timeline {
namespace {

constexpr double kSecondsPerDay = 86400.0;

}  // namespace

void validate(const BifocalConfig& c) {
  if (!(c.focus_fraction > 0.0 && c.focus_fraction < 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, "focus_fraction in (0, 1)");
  }
  if (c.context_days_per_side < 1) {
    throw Error(ErrorCode::ConfigInvalid, "context_days_per_side >= 1");
  }
  if (!(c.width > 0.0) || !std::isfinite(c.width)) {
    throw Error(ErrorCode::ConfigInvalid, "width > 0");
  }
}

BifocalLayout::BifocalLayout(Date focal_day, const BifocalConfig& config)
    : focal_day_(focal_day), config_(config) {
  validate(config);
  const int n = config.context_days_per_side;
  const double focus_width = config.focus_fraction * config.width;
  const double context_width = (config.width - focus_width) / (2.0 * n);

  // Boundaries are computed once and shared by neighbours so segments abut
  // bit-exactly; the right edge is pinned to the full width.
  std::vector<double> edges;
  edges.reserve(2 * n + 2);
  for (int i = 0; i <= n; ++i) edges.push_back(i * context_width);
  const double focus_end = n * context_width + focus_width;
  for (int j = 0; j < n; ++j) edges.push_back(focus_end + j * context_width);
  edges.push_back(config.width);

  segments_.reserve(2 * n + 1);
  for (int i = 0; i < 2 * n + 1; ++i) {
    const bool is_focus = i == n;
    segments_.push_back({focal_day - std::chrono::days{n - i}, edges[i], edges[i + 1],
                         is_focus ? SegmentKind::Focus : SegmentKind::Context});
  }
  focus_index_ = static_cast<std::size_t>(n);
}

double BifocalLayout::time_to_x(SpanTime t) const {
  const double offset = (t - SpanTime{span_start()}).count();
  const double total = static_cast<double>(segments_.size()) * kSecondsPerDay;
  if (!(offset >= 0.0 && offset <= total)) {
    throw Error(ErrorCode::OutOfSpan, "time outside the visible diary span");
  }
  const auto index = std::min(static_cast<std::size_t>(offset / kSecondsPerDay),
                              segments_.size() - 1);
  const DaySegment& seg = segments_[index];
  const double within = (offset - static_cast<double>(index) * kSecondsPerDay) / kSecondsPerDay;
  return seg.x_start + within * seg.width();
}

SpanTime BifocalLayout::x_to_time(double x) const {
  if (!(x >= 0.0 && x <= config_.width)) {
    throw Error(ErrorCode::OutOfSpan, "x outside [0, width]");
  }
  auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                             [](double v, const DaySegment& s) { return v < s.x_start; });
  const DaySegment& seg = *std::prev(it);
  const double within = std::clamp((x - seg.x_start) / seg.width(), 0.0, 1.0);
  return SpanTime{seg.day} + std::chrono::duration<double>{within * kSecondsPerDay};
}

bool BifocalLayout::operator==(const BifocalLayout& other) const {
  if (focal_day_ != other.focal_day_ || segments_.size() != other.segments_.size()) return false;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& a = segments_[i];
    const auto& b = other.segments_[i];
    if (a.day != b.day || a.x_start != b.x_start || a.x_end != b.x_end || a.kind != b.kind) {
      return false;
    }
  }
  return true;
}

int snap_target(double offset) {
  const double magnitude = std::abs(offset);
  const double whole = std::floor(magnitude);
  const double frac = magnitude - whole;
  const double snapped = frac > 0.5 ? whole + 1.0 : whole;
  return static_cast<int>(offset < 0.0 ? -snapped : snapped);
}

}  // namespace glucoscope::timeline
