#pragma once

#include <cstdint>
#include <vector>

#include "glucoscope/domain/settings.hpp"
#include "glucoscope/domain/types.hpp"
#include "glucoscope/engine/model_parameters.hpp"
#include "glucoscope/store/event_store.hpp"

namespace glucoscope::store {

struct DemoOptions {
  int days = 14;
  std::uint64_t seed = 1;
  Timestamp end;  // last CGM reading; should sit on a 5-minute boundary
  double noise_sd = 0.2;
  engine::ModelParameters params;
};

struct DemoSummary {
  Timestamp start;
  Timestamp end;
  std::size_t events = 0;
  std::size_t readings = 0;
  std::size_t meal_profiles = 0;
};

std::vector<MealProfile> demo_meal_library(Timestamp created_at);

// Fills an empty store with `days` of plausible diary data: meals from the
// demo library with matching recommended doses, evening exercise on some days,
// one stress episode, and a simulated CGM stream over the whole period.
// Deterministic in (days, seed, end).
DemoSummary seed_demo(EventStore& store, const DemoOptions& options);

}  // namespace glucoscope::store
