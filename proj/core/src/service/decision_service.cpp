#include "glucoscope/service/decision_service.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "glucoscope/domain/error.hpp"
#include "glucoscope/domain/serialization.hpp"
#include "glucoscope/domain/validation.hpp"
#include "glucoscope/store/replay.hpp"

namespace glucoscope::service {
namespace {

using std::chrono::hours;
using std::chrono::minutes;

// Exercise can last 10 h plus its 1 h tail, so look back further than the
// 8 h replay window when gathering forecast inputs.
constexpr hours kEventLookback{12};

void validate_request(const ExploreRequest& r) {
  if (!std::isfinite(r.carbs) || r.carbs < 0.0 || r.carbs > kMaxMealCarbs) {
    throw Error(ErrorCode::InvariantViolation, "carbs in [0, 500]");
  }
  if (r.mode == ExploreMode::DoseSweep && !r.dose_override) {
    throw Error(ErrorCode::InvariantViolation, "dose_sweep requires dose_override");
  }
  if (r.dose_override) validate_payload(InsulinDosePayload{*r.dose_override, DoseSource::Manual});
}

ExploreRequest resolved(ExploreRequest r, Timestamp now) {
  if (!r.at) r.at = now;
  if (!r.meal_category) r.meal_category = default_meal_category(*r.at);
  return r;
}

template <typename T>
nlohmann::json nullable(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string_view to_string(ExploreMode mode) noexcept {
  return mode == ExploreMode::DoseSweep ? "dose_sweep" : "carb_sweep";
}

std::string exploration_token(const ExploreRequest& request) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(store::fnv1a(nlohmann::json(request).dump())));
  return buf;
}

DecisionService::DecisionService(store::EventStore& store, engine::ModelParameters params,
                                 Clock clock, timeline::BifocalConfig diary)
    : store_(store), params_(params), clock_(std::move(clock)), diary_config_(diary) {
  engine::validate(params_);
  timeline::validate(diary_config_);
}

DecisionService::HistoryWindow DecisionService::history_at(Timestamp at) const {
  HistoryWindow h;
  h.readings = store_.readings({at - engine::kFreshnessWindow, at + std::chrono::seconds{1}});
  const Timestamp horizon_end = at + minutes{120} + std::chrono::seconds{1};
  // Flags are needed from the beginning of time; everything else only recently.
  const Timestamp lookback = at - kEventLookback;
  h.events = store_.query({Timestamp{}, lookback}, {EventKind::HealthFlag});
  auto recent = store_.query({lookback, horizon_end});
  h.events.insert(h.events.end(), std::make_move_iterator(recent.begin()),
                  std::make_move_iterator(recent.end()));
  return h;
}

ExploreResponse DecisionService::explore(const ExploreRequest& raw) const {
  validate_request(raw);
  const ExploreRequest request = resolved(raw, now());
  const Timestamp at = *request.at;

  const HistoryWindow history = history_at(at);
  const GlucoseReading& latest = engine::latest_fresh_reading(at, history.readings);
  const PatientSettings settings = store_.settings();

  std::vector<bolus::PriorDose> prior;
  for (const auto& event : history.events) {
    const auto* dose = event.get_if<InsulinDosePayload>();
    if (!dose || event.timestamp > at) continue;
    const double age = minutes_between(event.timestamp, at);
    if (age < settings.dia) prior.push_back({dose->units, age});
  }

  ExploreResponse response;
  response.request = request;
  response.recommended = bolus::recommend(request.carbs, latest.value, settings, prior);
  response.dose = request.mode == ExploreMode::CarbSweep ? response.recommended.total
                                                         : *request.dose_override;
  response.prediction =
      engine::predict(at, {history.readings, history.events},
                      {request.carbs, response.dose}, params_);
  response.token = exploration_token(request);
  return response;
}

CommitResult DecisionService::commit_exploration(const CommitRequest& commit) {
  if (!commit.request.at || commit.token.empty() ||
      commit.token != exploration_token(resolved(commit.request, *commit.request.at))) {
    throw Error(ErrorCode::ValidationFailure, "commit does not match a preceding explore");
  }
  const ExploreResponse explored = explore(commit.request);
  const ExploreRequest& request = explored.request;
  const Timestamp at = *request.at;

  MealEventPayload meal;
  meal.carbs = request.carbs;
  meal.category = *request.meal_category;
  meal.meal_profile_id = request.meal_profile_id;
  if (request.meal_profile_id) {
    if (auto profile = store_.meal(*request.meal_profile_id)) {
      meal.protein = profile->protein;
      meal.fat = profile->fat;
    }
  }
  std::vector<DiaryEvent> events;
  events.push_back({"", at, meal});
  if (commit.accept_dose && explored.dose > 0.0) {
    const auto source = request.mode == ExploreMode::CarbSweep ? DoseSource::Recommended
                                                               : DoseSource::Manual;
    events.push_back({"", at, InsulinDosePayload{explored.dose, source}});
  }

  CommitResult result;
  for (auto& a : store_.append_batch(std::move(events))) {
    result.sequence_numbers.push_back(a.sequence);
    result.appended.push_back(std::move(a.event));
  }
  result.day = day(day_of(at));
  return result;
}

std::vector<AdviceItem> DecisionService::advice() const {
  const Timestamp at = now();
  const HistoryWindow history = history_at(at);
  AdviceInputs inputs;
  inputs.now = at;
  inputs.settings = store_.settings();
  inputs.flags = active_flags(history.events, at);
  try {
    inputs.latest = engine::latest_fresh_reading(at, history.readings);
    inputs.prediction = engine::predict(at, {history.readings, history.events}, {}, params_);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::StaleData) throw;
  }
  return evaluate_advice(inputs);
}

nlohmann::json DecisionService::diary(std::optional<Date> focal_day) const {
  const Timestamp at = now();
  const timeline::BifocalLayout layout(focal_day.value_or(day_of(at)), diary_config_);
  const auto snap = store_.snapshot();
  const auto readings = store_.readings({layout.span_start(), layout.span_end()});
  auto doc = timeline::diary_geometry(layout, readings, snap.events,
                                      snap.settings.thresholds());
  doc["now"] = format_timestamp(at);
  doc["now_x"] = layout.visible(at) ? nlohmann::json(layout.time_to_x(at)) : nlohmann::json(nullptr);
  return doc;
}

timeline::FocalDayDetail DecisionService::day(Date date) const {
  const Timestamp at = now();
  std::optional<engine::PredictionResult> prediction;
  if (date == day_of(at)) {
    const HistoryWindow history = history_at(at);
    try {
      prediction = engine::predict(at, {history.readings, history.events}, {}, params_);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::StaleData) throw;
    }
  }
  const TimeRange range = day_range(date);
  return timeline::focal_day_detail(date, store_.readings(range), store_.query(range),
                                    store_.meals(), std::move(prediction));
}

store::PeriodStatistics DecisionService::stats(store::Period period,
                                               std::optional<Date> at) const {
  const Date day = at.value_or(day_of(now()));
  const TimeRange range = store::period_range(period, day);
  return store::period_statistics(period, day, store_.query(range), store_.readings(range),
                                  store_.settings().thresholds());
}

void to_json(nlohmann::json& j, const ExploreRequest& r) {
  j = nlohmann::json{
      {"mode", to_string(r.mode)},
      {"carbs", r.carbs},
      {"dose_override", nullable(r.dose_override)},
      {"at", r.at ? nlohmann::json(format_timestamp(*r.at)) : nlohmann::json(nullptr)},
      {"meal_category",
       r.meal_category ? nlohmann::json(to_string(*r.meal_category)) : nlohmann::json(nullptr)},
      {"meal_profile_id", nullable(r.meal_profile_id)}};
}

void from_json(const nlohmann::json& j, ExploreRequest& r) {
  const auto mode = j.value("mode", std::string("carb_sweep"));
  if (mode == "carb_sweep") {
    r.mode = ExploreMode::CarbSweep;
  } else if (mode == "dose_sweep") {
    r.mode = ExploreMode::DoseSweep;
  } else {
    throw Error(ErrorCode::ParseError, "unknown explore mode '" + mode + "'");
  }
  r.carbs = j.value("carbs", kDefaultExploreCarbs);
  auto present = [&](const char* key) { return j.contains(key) && !j.at(key).is_null(); };
  r.dose_override = present("dose_override") ? std::optional(j.at("dose_override").get<double>())
                                              : std::nullopt;
  r.at = present("at") ? std::optional(parse_timestamp(j.at("at").get<std::string>()))
                       : std::nullopt;
  r.meal_category =
      present("meal_category")
          ? std::optional(parse_meal_category(j.at("meal_category").get<std::string>()))
          : std::nullopt;
  r.meal_profile_id = present("meal_profile_id")
                          ? std::optional(j.at("meal_profile_id").get<std::string>())
                          : std::nullopt;
}

void to_json(nlohmann::json& j, const ExploreResponse& r) {
  j = nlohmann::json{{"request", r.request},
                     {"prediction", r.prediction},
                     {"recommended", r.recommended},
                     {"dose", r.dose},
                     {"token", r.token}};
}

void from_json(const nlohmann::json& j, CommitRequest& c) {
  c.request = j.at("request").get<ExploreRequest>();
  c.token = j.value("token", std::string{});
  c.accept_dose = j.value("accept_dose", true);
}

void to_json(nlohmann::json& j, const CommitResult& c) {
  j = nlohmann::json{{"appended", c.appended},
                     {"sequence_numbers", c.sequence_numbers},
                     {"day", c.day}};
}

}  // namespace glucoscope::service

namespace glucoscope::bolus {

void to_json(nlohmann::json& j, const BolusBreakdown& b) {
  j = nlohmann::json{{"meal_component", b.meal_component},
                     {"correction_component", b.correction_component},
                     {"iob_deduction", b.iob_deduction},
                     {"total", b.total}};
}

}  // namespace glucoscope::bolus
