#include "glucoscope/engine/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "glucoscope/domain/error.hpp"

namespace glucoscope::engine {
namespace {

using Vec = std::array<double, 7>;
enum Index { kG, kX, kI, kD1, kD2, kS1, kS2 };

Vec to_vec(const SimulationState& s) {
  return {s.glucose, s.insulin_action, s.plasma_insulin, s.gut1, s.gut2, s.subcut1, s.subcut2};
}

SimulationState to_state(const Vec& v) {
  return {v[kG], v[kX], v[kI], v[kD1], v[kD2], v[kS1], v[kS2]};
}

struct Forcing {
  double exercise_rate = 0.0;  // 1/min
  double stress_adj = 1.0;
};

struct Impulse {
  double at = 0.0;  // minutes from start
  double carbs = 0.0;
  double units = 0.0;
};

class Model {
 public:
  explicit Model(const ModelParameters& p)
      : p_(p),
        glucose_inflow_(kMmolPerGramGlucose / (p.glucose_volume * p.body_weight)),
        insulin_inflow_(1000.0 / (p.insulin_volume * p.body_weight)) {}

  Vec rhs(const Vec& y, const Forcing& f) const {
    const double ra = y[kD2] / p_.meal_absorption_time;
    const double u = y[kS2] / p_.insulin_absorption_time;
    const double p1 = p_.glucose_effectiveness * f.stress_adj;
    Vec d;
    d[kG] = -(p1 + y[kX] + f.exercise_rate) * y[kG] + p1 * p_.basal_glucose +
            ra * glucose_inflow_;
    d[kX] = -p_.remote_insulin_decay * y[kX] +
            p_.insulin_action_gain * (y[kI] - p_.basal_insulin);
    d[kI] = u * insulin_inflow_ - p_.insulin_elimination * (y[kI] - p_.basal_insulin);
    d[kD1] = -y[kD1] / p_.meal_absorption_time;
    d[kD2] = (y[kD1] - y[kD2]) / p_.meal_absorption_time;
    d[kS1] = -y[kS1] / p_.insulin_absorption_time;
    d[kS2] = (y[kS1] - y[kS2]) / p_.insulin_absorption_time;
    return d;
  }

  Vec rk4(const Vec& y, double h, const Forcing& f) const {
    auto axpy = [](const Vec& a, double s, const Vec& b) {
      Vec r;
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + s * b[i];
      return r;
    };
    const Vec k1 = rhs(y, f);
    const Vec k2 = rhs(axpy(y, h / 2, k1), f);
    const Vec k3 = rhs(axpy(y, h / 2, k2), f);
    const Vec k4 = rhs(axpy(y, h, k3), f);
    Vec out;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
  }

  void apply(Vec& y, const Impulse& impulse) const {
    y[kD1] += p_.bioavailability * impulse.carbs;
    y[kS1] += impulse.units;
  }

 private:
  const ModelParameters& p_;
  double glucose_inflow_;
  double insulin_inflow_;
};

// Exercise and flag forcing as a function of minutes since start.
class ForcingSchedule {
 public:
  ForcingSchedule(const ScenarioInputs& inputs, const ModelParameters& p, Timestamp start,
                  double horizon)
      : stress_factor_(p.stress_factor), gain_(p.exercise_gain) {
    auto keep = [&](double t) {
      if (t > 0.0 && t < horizon) breakpoints_.push_back(t);
    };
    for (const auto& ex : inputs.exercises) {
      const double s = minutes_between(start, ex.start);
      windows_.push_back({s, s + ex.duration, s + ex.duration + kExerciseTailMinutes,
                          static_cast<double>(ex.intensity)});
      keep(s);
      keep(s + ex.duration);
      keep(s + ex.duration + kExerciseTailMinutes);
    }
    for (const auto& flag : inputs.flags) {
      const double s = minutes_between(start, flag.start);
      const double e = flag.end ? minutes_between(start, *flag.end)
                                : std::numeric_limits<double>::infinity();
      flags_.push_back({s, e});
      keep(s);
      keep(e);
    }
    std::sort(breakpoints_.begin(), breakpoints_.end());
  }

  Forcing at(double t) const {
    Forcing f;
    for (const auto& w : windows_) {
      if (t >= w.start && t < w.end) {
        f.exercise_rate += gain_ * w.intensity;
      } else if (t >= w.end && t < w.tail_end) {
        f.exercise_rate += kExerciseTailGain * gain_ * w.intensity;
      }
    }
    for (const auto& [s, e] : flags_) {
      if (t >= s && t < e) {
        f.stress_adj = stress_factor_;
        break;
      }
    }
    return f;
  }

  const std::vector<double>& breakpoints() const { return breakpoints_; }

 private:
  struct Window {
    double start, end, tail_end, intensity;
  };
  double stress_factor_;
  double gain_;
  std::vector<Window> windows_;
  std::vector<std::pair<double, double>> flags_;
  std::vector<double> breakpoints_;
};

bool finite(const Vec& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

SimulationState basal_state(const ModelParameters& params) {
  SimulationState s;
  s.glucose = params.basal_glucose;
  s.plasma_insulin = params.basal_insulin;
  return s;
}

void validate(const SimulationState& s) {
  const Vec v = to_vec(s);
  if (!finite(v)) throw Error(ErrorCode::InvariantViolation, "state finite");
  if (!(s.glucose > 0.0)) throw Error(ErrorCode::InvariantViolation, "G > 0");
  if (s.plasma_insulin < 0.0 || s.gut1 < 0.0 || s.gut2 < 0.0 || s.subcut1 < 0.0 ||
      s.subcut2 < 0.0) {
    throw Error(ErrorCode::InvariantViolation, "compartments >= 0");
  }
}

ScenarioInputs inputs_from_events(std::span<const DiaryEvent> events) {
  ScenarioInputs inputs;
  std::optional<Timestamp> stress_since;
  std::optional<Timestamp> illness_since;
  for (const auto& event : events) {
    if (const auto* meal = event.get_if<MealEventPayload>()) {
      inputs.meals.push_back({event.timestamp, meal->carbs});
    } else if (const auto* dose = event.get_if<InsulinDosePayload>()) {
      inputs.doses.push_back({event.timestamp, dose->units});
    } else if (const auto* ex = event.get_if<ExerciseEventPayload>()) {
      inputs.exercises.push_back({event.timestamp, ex->duration, ex->intensity});
    } else if (const auto* flag = event.get_if<HealthFlagPayload>()) {
      switch (flag->flag) {
        case HealthFlag::StressOn:
          if (!stress_since) stress_since = event.timestamp;
          break;
        case HealthFlag::IllnessOn:
          if (!illness_since) illness_since = event.timestamp;
          break;
        case HealthFlag::StressOff:
          if (stress_since) inputs.flags.push_back({*stress_since, event.timestamp});
          stress_since.reset();
          break;
        case HealthFlag::IllnessOff:
          if (illness_since) inputs.flags.push_back({*illness_since, event.timestamp});
          illness_since.reset();
          break;
      }
    }
  }
  if (stress_since) inputs.flags.push_back({*stress_since, std::nullopt});
  if (illness_since) inputs.flags.push_back({*illness_since, std::nullopt});
  return inputs;
}

std::vector<double> Trajectory::glucose() const {
  std::vector<double> g;
  g.reserve(states.size());
  for (const auto& s : states) g.push_back(s.glucose);
  return g;
}

Trajectory simulate(const SimulationState& initial, const ModelParameters& params,
                    const ScenarioInputs& inputs, Timestamp start, double horizon_minutes,
                    double dt_minutes) {
  validate(params);
  validate(initial);
  if (!(dt_minutes > 0.0) || !(horizon_minutes >= 0.0) || !std::isfinite(horizon_minutes)) {
    throw Error(ErrorCode::ConfigInvalid, "dt > 0 and horizon >= 0");
  }
  const double ratio = horizon_minutes / dt_minutes;
  const auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(ErrorCode::ConfigInvalid, "dt must divide the horizon");
  }

  std::vector<Impulse> impulses;
  for (const auto& meal : inputs.meals) {
    impulses.push_back({minutes_between(start, meal.time), meal.carbs, 0.0});
  }
  for (const auto& dose : inputs.doses) {
    impulses.push_back({minutes_between(start, dose.time), 0.0, dose.units});
  }
  std::erase_if(impulses, [&](const Impulse& i) { return i.at < 0.0 || i.at > horizon_minutes; });
  std::stable_sort(impulses.begin(), impulses.end(),
                   [](const Impulse& a, const Impulse& b) { return a.at < b.at; });

  const Model model(params);
  const ForcingSchedule schedule(inputs, params, start, horizon_minutes);
  const auto& breakpoints = schedule.breakpoints();

  Trajectory out;
  out.start = start;
  out.dt = dt_minutes;
  out.states.reserve(steps + 1);

  Vec y = to_vec(initial);
  std::size_t next_impulse = 0;
  std::size_t next_break = 0;
  auto apply_due = [&](double t) {
    while (next_impulse < impulses.size() && impulses[next_impulse].at <= t) {
      model.apply(y, impulses[next_impulse++]);
    }
  };
  apply_due(0.0);
  out.states.push_back(to_state(y));

  double t = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t_end =
        k + 1 == steps ? horizon_minutes : static_cast<double>(k + 1) * dt_minutes;
    while (t < t_end) {
      while (next_break < breakpoints.size() && breakpoints[next_break] <= t) ++next_break;
      double stop = t_end;
      if (next_impulse < impulses.size()) stop = std::min(stop, impulses[next_impulse].at);
      if (next_break < breakpoints.size()) stop = std::min(stop, breakpoints[next_break]);
      const Forcing forcing = schedule.at(0.5 * (t + stop));
      y = model.rk4(y, stop - t, forcing);
      t = stop;
      apply_due(t);
    }
    if (!finite(y)) {
      throw Error(ErrorCode::NonFiniteState,
                  "integration diverged at t=" + std::to_string(t) + " min");
    }
    out.states.push_back(to_state(y));
  }
  return out;
}

void to_json(nlohmann::json& j, const SimulationState& s) {
  j = nlohmann::json{{"G", s.glucose},  {"X", s.insulin_action}, {"I", s.plasma_insulin},
                     {"D1", s.gut1},    {"D2", s.gut2},          {"S1", s.subcut1},
                     {"S2", s.subcut2}};
}

void from_json(const nlohmann::json& j, SimulationState& s) {
  s.glucose = j.at("G").get<double>();
  s.insulin_action = j.value("X", 0.0);
  s.plasma_insulin = j.at("I").get<double>();
  s.gut1 = j.value("D1", 0.0);
  s.gut2 = j.value("D2", 0.0);
  s.subcut1 = j.value("S1", 0.0);
  s.subcut2 = j.value("S2", 0.0);
}

}  // namespace glucoscope::engine
