#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "glucoscope/domain/error.hpp"
#include "glucoscope/domain/serialization.hpp"
#include "glucoscope/engine/model_parameters.hpp"
#include "glucoscope/service/decision_service.hpp"
#include "glucoscope/service/http_api.hpp"
#include "glucoscope/store/cgm_simulator.hpp"
#include "glucoscope/store/demo.hpp"
#include "glucoscope/store/event_store.hpp"
#include "glucoscope/store/period_statistics.hpp"

namespace {

using namespace glucoscope;

service::HttpApi* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

engine::ModelParameters params_from(const std::string& file) {
  return file.empty() ? engine::ModelParameters{} : engine::load_model_parameters(file);
}

Timestamp floor_to_cadence(Timestamp t) {
  auto m = std::chrono::floor<std::chrono::minutes>(t);
  return m - std::chrono::minutes{m.time_since_epoch().count() % 5};
}

// "latest" pins the clock at the newest stored reading, useful for replaying
// a seeded store; anything else is an RFC 3339 instant; empty means wall clock.
service::DecisionService::Clock make_clock(const std::string& value, const store::EventStore& store) {
  if (value.empty()) return now_utc;
  if (value == "latest") {
    auto latest = store.latest_reading();
    Timestamp t = latest ? latest->timestamp : now_utc();
    return [t] { return t; };
  }
  Timestamp t = parse_timestamp(value);
  return [t] { return t; };
}

int run_serve(const std::string& data_dir, const std::string& host, int port,
              const std::string& now, const std::string& params_file) {
  store::EventStore store(data_dir);
  service::DecisionService service(store, params_from(params_file), make_clock(now, store));
  service::HttpApi api(service);
  g_server = &api;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "listening on " << host << ":" << port << " (data " << data_dir << ")\n";
  bool ok = api.listen(host, port);
  g_server = nullptr;
  if (!ok) {
    std::cerr << "could not bind " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}

int run_seed_demo(const std::string& data_dir, int days, std::uint64_t seed,
                  const std::string& end, double noise, const std::string& params_file) {
  store::EventStore store(data_dir);
  store::DemoOptions options;
  options.days = days;
  options.seed = seed;
  options.noise_sd = noise;
  options.params = params_from(params_file);
  options.end = end.empty() ? floor_to_cadence(now_utc()) : parse_timestamp(end);
  auto summary = store::seed_demo(store, options);
  std::cout << "seeded " << data_dir << ": " << summary.events << " events, " << summary.readings
            << " readings, " << summary.meal_profiles << " meal profiles, "
            << format_timestamp(summary.start) << " .. " << format_timestamp(summary.end) << "\n";
  return 0;
}

int run_simulate(const std::string& scenario, std::optional<std::uint64_t> seed, int days,
                 std::optional<double> noise, const std::string& start, const std::string& out,
                 const std::string& params_file) {
  store::CgmSimulatorConfig config;
  if (!scenario.empty()) {
    config = store::load_scenario(scenario);
  } else {
    config.params = params_from(params_file);
  }
  if (seed) config.seed = *seed;
  if (noise) config.noise_sd = *noise;
  Timestamp t0 = start.empty() ? floor_to_cadence(now_utc()) - std::chrono::days{days}
                               : parse_timestamp(start);
  auto readings = store::simulate_cgm(config, t0, std::chrono::days{days});

  std::ofstream file;
  if (!out.empty()) {
    file.open(out, std::ios::trunc);
    if (!file) throw Error(ErrorCode::StorageFailure, "cannot write " + out);
  }
  std::ostream& os = out.empty() ? std::cout : file;
  for (const auto& r : readings) os << nlohmann::json(r).dump() << '\n';
  if (!out.empty()) std::cerr << readings.size() << " readings written to " << out << "\n";
  return 0;
}

int run_predict(double carbs, std::optional<double> dose, const std::string& data_dir,
                double glucose, const std::string& at, const std::string& params_file) {
  std::optional<store::EventStore> store;
  if (data_dir.empty()) {
    store.emplace();
    Timestamp now = at.empty() ? floor_to_cadence(now_utc()) : parse_timestamp(at);
    store->append_reading({now, glucose});
  } else {
    store.emplace(data_dir);
  }
  service::DecisionService service(*store, params_from(params_file),
                                   make_clock(at.empty() ? "latest" : at, *store));

  service::ExploreRequest request;
  request.carbs = carbs;
  if (dose) {
    request.mode = service::ExploreMode::DoseSweep;
    request.dose_override = dose;
  }
  auto response = service.explore(request);
  const auto& rec = response.recommended;
  const auto& p = response.prediction;

  std::printf("at %s  carbs %.1f g  dose %.1f U\n", format_timestamp(p.start_time).c_str(), carbs,
              response.dose);
  std::printf("recommended %.1f U (meal %.2f, correction %.2f, iob %.2f)\n\n", rec.total,
              rec.meal_component, rec.correction_component, rec.iob_deduction);
  std::printf("%6s  %-20s  %8s  %8s  %8s\n", "min", "time", "glucose", "lower", "upper");
  for (std::size_t k = 0; k < p.points.size(); ++k) {
    std::printf("%6zu  %-20s  %8.2f  %8.2f  %8.2f\n", k * static_cast<std::size_t>(p.step),
                format_timestamp(p.time_at(k)).c_str(), p.points[k], p.lower[k], p.upper[k]);
  }
  return 0;
}

int run_stats(const std::string& data_dir, const std::string& period, const std::string& at) {
  store::EventStore store(data_dir);
  service::DecisionService service(store, {}, make_clock("latest", store));
  std::optional<Date> date;
  if (!at.empty()) date = parse_date(at);
  auto stats = service.stats(store::parse_period(period), date);
  std::cout << nlohmann::json(stats).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glucoscope: type 1 diabetes diary, prediction and dosing support"};
  app.require_subcommand(1);

  std::string data_dir, params_file, host = "127.0.0.1", now, end, scenario, start, out, at;
  std::string period = "week";
  int port = 8080, days = 14, sim_days = 1;
  std::uint64_t seed = 1, sim_seed = 0;
  double noise = 0.2, sim_noise = 0.0, carbs = 0.0, dose = 0.0, glucose = 6.5;

  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON API");
  serve->add_option("--data-dir", data_dir, "Store directory")->required();
  serve->add_option("--port", port, "TCP port")->capture_default_str();
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--now", now, "Pin the service clock: 'latest' or an RFC 3339 time");
  serve->add_option("--params", params_file, "Model parameter JSON");

  auto* seed_demo = app.add_subcommand("seed-demo", "Fill an empty store with demo data");
  seed_demo->add_option("--data-dir", data_dir, "Store directory")->required();
  seed_demo->add_option("--days", days, "Days of data")->capture_default_str()
      ->check(CLI::Range(1, 365));
  seed_demo->add_option("--seed", seed, "RNG seed")->capture_default_str();
  seed_demo->add_option("--end", end, "Last reading time (default: now)");
  seed_demo->add_option("--noise", noise, "CGM noise sd, mmol/L")->capture_default_str();
  seed_demo->add_option("--params", params_file, "Model parameter JSON");

  auto* simulate = app.add_subcommand("simulate", "Simulated CGM stream as NDJSON");
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "RNG seed");
  simulate->add_option("--days", sim_days, "Days to simulate")->capture_default_str()
      ->check(CLI::Range(1, 365));
  simulate->add_option("--scenario", scenario, "Scenario JSON file")->check(CLI::ExistingFile);
  auto* sim_noise_opt = simulate->add_option("--noise", sim_noise, "CGM noise sd, mmol/L");
  simulate->add_option("--start", start, "First reading time (default: now - days)");
  simulate->add_option("--out", out, "Output file (default: stdout)");
  simulate->add_option("--params", params_file, "Model parameter JSON");

  auto* predict = app.add_subcommand("predict", "What-if forecast as a table");
  predict->add_option("--carbs", carbs, "Carbohydrate, g")->required();
  auto* dose_opt = predict->add_option("--dose", dose, "Dose override, U");
  predict->add_option("--data-dir", data_dir, "Store directory (default: single reading)");
  predict->add_option("--glucose", glucose, "Current glucose without a store, mmol/L")
      ->capture_default_str();
  predict->add_option("--at", at, "Prediction time (default: latest reading)");
  predict->add_option("--params", params_file, "Model parameter JSON");

  auto* stats = app.add_subcommand("stats", "Period statistics as JSON");
  stats->add_option("--data-dir", data_dir, "Store directory")->required();
  stats->add_option("--period", period, "day, week or month")->capture_default_str()
      ->check(CLI::IsMember({"day", "week", "month"}));
  stats->add_option("--at", at, "Last day of the period, YYYY-MM-DD (default: latest reading)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return run_serve(data_dir, host, port, now, params_file);
    if (*seed_demo) return run_seed_demo(data_dir, days, seed, end, noise, params_file);
    if (*simulate) {
      return run_simulate(scenario,
                          sim_seed_opt->count() ? std::optional<std::uint64_t>{sim_seed} : std::nullopt,
                          sim_days,
                          sim_noise_opt->count() ? std::optional<double>{sim_noise} : std::nullopt,
                          start, out, params_file);
    }
    if (*predict) {
      return run_predict(carbs, dose_opt->count() ? std::optional<double>{dose} : std::nullopt,
                         data_dir, glucose, at, params_file);
    }
    if (*stats) return run_stats(data_dir, period, at);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
