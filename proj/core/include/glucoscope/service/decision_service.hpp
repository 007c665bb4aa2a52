#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glucoscope/bolus/advisor.hpp"
#include "glucoscope/domain/types.hpp"
#include "glucoscope/engine/model_parameters.hpp"
#include "glucoscope/engine/predictor.hpp"
#include "glucoscope/service/advice.hpp"
#include "glucoscope/store/event_store.hpp"
#include "glucoscope/store/period_statistics.hpp"
#include "glucoscope/timeline/bifocal.hpp"
#include "glucoscope/timeline/diary_document.hpp"

namespace glucoscope::service {

enum class ExploreMode { CarbSweep, DoseSweep };

inline constexpr double kDefaultExploreCarbs = 40.0;

struct ExploreRequest {
  ExploreMode mode = ExploreMode::CarbSweep;
  double carbs = kDefaultExploreCarbs;
  std::optional<double> dose_override;  // required for DoseSweep
  std::optional<Timestamp> at;          // service clock when absent
  std::optional<MealCategory> meal_category;  // time-of-day default when absent
  std::optional<std::string> meal_profile_id;

  bool operator==(const ExploreRequest&) const = default;
};

struct ExploreResponse {
  ExploreRequest request;  // echoed with `at` and `meal_category` resolved
  engine::PredictionResult prediction;
  bolus::BolusBreakdown recommended;
  double dose = 0.0;  // the dose the prediction assumes
  std::string token;  // hand back to commit
};

struct CommitRequest {
  ExploreRequest request;
  std::string token;
  bool accept_dose = true;
};

struct CommitResult {
  std::vector<DiaryEvent> appended;
  std::vector<std::uint64_t> sequence_numbers;
  timeline::FocalDayDetail day;
};

// Deterministic digest of a resolved request. Exploration keeps no server
// state; commit proves a matching explore happened by echoing this token.
std::string exploration_token(const ExploreRequest& resolved);

// Ties engine, advisor, diary geometry and the store together for the UI.
// Reads (explore, advice, diary, stats) never mutate anything and may run
// concurrently; writes go through the store's single-writer path.
class DecisionService {
 public:
  using Clock = std::function<Timestamp()>;

  DecisionService(store::EventStore& store, engine::ModelParameters params,
                  Clock clock = now_utc, timeline::BifocalConfig diary = {});

  Timestamp now() const { return clock_(); }
  const engine::ModelParameters& params() const { return params_; }
  store::EventStore& store() { return store_; }

  // CarbSweep: dose = recommended total for the carbs. DoseSweep: dose is the
  // override with carbs fixed. Throws StaleData without a recent reading and
  // InvariantViolation for malformed requests.
  ExploreResponse explore(const ExploreRequest& request) const;

  // Re-runs the explore, then appends the meal (and the dose when accepted and
  // non-zero) in one batch. A missing or mismatched token is a ValidationFailure.
  CommitResult commit_exploration(const CommitRequest& commit);

  std::vector<AdviceItem> advice() const;

  nlohmann::json diary(std::optional<Date> focal_day = std::nullopt) const;
  timeline::FocalDayDetail day(Date date) const;
  store::PeriodStatistics stats(store::Period period, std::optional<Date> at = std::nullopt) const;

  store::Appended append_event(DiaryEvent event) {
    std::vector<DiaryEvent> one;
    one.push_back(std::move(event));
    return store_.append_batch(std::move(one)).front();
  }

 private:
  struct HistoryWindow {
    std::vector<GlucoseReading> readings;
    std::vector<DiaryEvent> events;
  };
  HistoryWindow history_at(Timestamp at) const;

  store::EventStore& store_;
  engine::ModelParameters params_;
  Clock clock_;
  timeline::BifocalConfig diary_config_;
};

std::string_view to_string(ExploreMode mode) noexcept;

void to_json(nlohmann::json& j, const ExploreRequest& r);
void from_json(const nlohmann::json& j, ExploreRequest& r);
void to_json(nlohmann::json& j, const ExploreResponse& r);
void from_json(const nlohmann::json& j, CommitRequest& c);
void to_json(nlohmann::json& j, const CommitResult& c);

}  // namespace glucoscope::service

namespace glucoscope::bolus {
void to_json(nlohmann::json& j, const BolusBreakdown& b);
}
