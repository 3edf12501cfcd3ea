#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "hvacsr/app/pipeline.hpp"
#include "hvacsr/core/error.hpp"
#include "hvacsr/io/csv.hpp"
#include "hvacsr/io/report.hpp"

namespace fs = std::filesystem;
using namespace hvacsr;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "configuration file (JSON with comments)");
  cmd->add_option("--seed", c.seed, "override the root seed");
  cmd->add_option("--out", c.out, "override the output directory");
}

app::RunConfig resolve(const Common& c) {
  app::RunConfig cfg = c.config.empty() ? app::config_from_json(io::Json::object()) : app::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.output_dir = c.out;
  cfg.validate();
  return cfg;
}

void print_metrics(const plant::MetricsReport& m) {
  std::printf("%-11s peak %.3f kW  energy %.3f kWh  comfort rmse %.3f C  violation %.3f C*h\n", m.name.c_str(),
              m.peak_kw, m.energy_kwh, m.comfort_rmse, m.violation_degree_hours);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::string comparison_csv(const app::CompareOutcome& r) {
  std::string s = "name,seed,peak_kw,energy_kwh,comfort_rmse,violation_degree_hours\n";
  for (const auto* o : {&r.proposed, &r.baseline}) {
    s += o->metrics.name + "," + std::to_string(o->log.seed) + "," + io::format_number(o->metrics.peak_kw) + "," +
         io::format_number(o->metrics.energy_kwh) + "," + io::format_number(o->metrics.comfort_rmse) + "," +
         io::format_number(o->metrics.violation_degree_hours) + "\n";
  }
  s += "peak_reduction_pct," + io::format_number(100.0 * r.peak_reduction) + "\n";
  s += "energy_delta_pct," + io::format_number(100.0 * r.energy_delta) + "\n";
  return s;
}

int cmd_config_init(const Common& c) {
  const std::string text = app::default_config_text();
  if (c.out.empty()) {
    std::cout << text;
  } else {
    write_text(c.out, text);
    std::cout << "wrote " << c.out << "\n";
  }
  return 0;
}

int cmd_train_srm(const Common& c) {
  const auto cfg = resolve(c);
  const auto weather = app::make_weather(cfg);
  const auto training = app::training_frame(cfg, weather);
  const auto result = app::train_srm(cfg, training);
  fs::create_directories(cfg.model_dir);
  io::write_json(io::to_json(result.model), cfg.thermal_model_path());
  auto report = result.report;
  report["seed"] = cfg.seed;
  report["config_hash"] = app::config_hash(cfg);
  io::write_json(report, cfg.model_dir / "train_report.json");
  if (cfg.training_data.empty()) io::store_frame(training, cfg.model_dir / "training.csv");
  std::cout << result.model.equation(4) << "\n";
  std::cout << "mse " << result.model.training_mse << "  complexity " << result.model.complexity << "\n";
  std::cout << "wrote " << cfg.thermal_model_path().string() << "\n";
  return 0;
}

int cmd_fit_hvac(const Common& c) {
  const auto cfg = resolve(c);
  const auto result = app::fit_hvac(cfg);
  fs::create_directories(cfg.model_dir);
  io::write_json(io::to_json(result.model), cfg.hvac_model_path());
  io::write_json(result.report, cfg.model_dir / "hvac_fit_report.json");
  std::cout << "q_min " << result.model.q_min() << " kW  q_max " << result.model.q_max() << " kW\n";
  std::cout << "wrote " << cfg.hvac_model_path().string() << "\n";
  return 0;
}

int cmd_simulate(const Common& c, const std::string& controller_name, bool dry_run) {
  const auto cfg = resolve(c);
  const auto controller = plant::parse_controller(controller_name);
  const auto dir = app::run_directory(cfg, "simulate-" + controller_name);
  if (dry_run) {
    std::cout << "controller " << controller_name << "\n"
              << "start " << format_iso8601(cfg.start) << "  days " << cfg.days << "  step " << cfg.step_minutes
              << " min  horizon " << cfg.horizon << "\n"
              << "output " << dir.string() << "\n"
              << "config_hash " << app::config_hash(cfg) << "\n"
              << app::to_json(cfg).dump(2) << "\n";
    if (controller == plant::ControllerKind::Mpc) (void)app::load_models(cfg);
    return 0;
  }
  std::optional<app::Models> models;
  if (controller == plant::ControllerKind::Mpc) models = app::load_models(cfg);
  const auto weather = app::make_weather(cfg);
  const auto run = app::simulate(cfg, controller, weather, models ? &*models : nullptr);
  app::write_run_metadata(cfg, "simulate", dir);
  io::emit_report({run.log}, {run.metrics}, dir, {cfg.include_timing});
  io::write_json(io::to_json(run.metrics), dir / "metrics.json");
  print_metrics(run.metrics);
  std::cout << "wrote " << dir.string() << "\n";
  return 0;
}

int cmd_compare(const Common& c, bool use_models) {
  const auto cfg = resolve(c);
  const auto dir = app::run_directory(cfg, "compare");
  const auto weather = app::make_weather(cfg);
  std::optional<app::Models> models;
  fs::create_directories(dir / "models");
  if (use_models) {
    models = app::load_models(cfg);
  } else {
    const auto training = app::training_frame(cfg, weather);
    auto trained = app::train_srm(cfg, training);
    auto fitted = app::fit_hvac(cfg);
    io::write_json(io::to_json(trained.model), dir / "models" / "thermal_model.json");
    io::write_json(trained.report, dir / "models" / "train_report.json");
    io::write_json(io::to_json(fitted.model), dir / "models" / "hvac_model.json");
    io::write_json(fitted.report, dir / "models" / "hvac_fit_report.json");
    models.emplace(app::Models{trained.model, fitted.model});
  }
  const auto result = app::compare(cfg, weather, *models);
  app::write_run_metadata(cfg, "compare", dir);
  io::emit_report({result.proposed.log, result.baseline.log}, {result.proposed.metrics, result.baseline.metrics}, dir,
                  {cfg.include_timing});
  io::write_json(result.summary, dir / "comparison.json");
  write_text(dir / "comparison.csv", comparison_csv(result));
  std::cout << "thermal model: " << models->thermal.equation(4) << "\n";
  print_metrics(result.proposed.metrics);
  print_metrics(result.baseline.metrics);
  std::printf("peak reduction %.1f%%  energy delta %+.1f%%  config %s  seed %llu\n", 100.0 * result.peak_reduction,
              100.0 * result.energy_delta, app::config_hash(cfg).c_str(), static_cast<unsigned long long>(cfg.seed));
  std::cout << "wrote " << dir.string() << "\n";
  return 0;
}

int cmd_report(const Common& c, const std::string& run_dir) {
  const auto cfg = resolve(c);
  std::vector<ExperimentLog> logs;
  std::vector<plant::MetricsReport> metrics;
  for (const char* name : {"mpc", "thermostat"}) {
    const fs::path p = fs::path(run_dir) / (std::string(name) + ".csv");
    if (!fs::exists(p)) continue;
    logs.emplace_back(io::load_frame(p, cfg.step()), name, cfg.seed);
    metrics.push_back(plant::metrics(logs.back(), cfg.comfort, app::metrics_config(cfg)));
    print_metrics(metrics.back());
  }
  if (logs.empty()) throw DataError("no mpc.csv or thermostat.csv in " + run_dir);
  const fs::path out = c.out.empty() ? fs::path(run_dir) : fs::path(c.out);
  io::emit_report(logs, metrics, out, {cfg.include_timing});
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

// One decision per step from a measured-history CSV (T_in, D, T_out; last row is now).
int cmd_control(const Common& c, const std::string& state_csv, int iterations) {
  const auto cfg = resolve(c);
  const auto models = app::load_models(cfg);
  std::unique_ptr<io::ForecastProvider> provider;
  if (cfg.weather.source == app::WeatherSource::Http) {
    provider = std::make_unique<io::HttpForecastProvider>(cfg.weather.http, io::make_default_http_client());
  } else {
    provider = std::make_unique<io::FileReplayProvider>(app::make_weather(cfg));
  }
  // Scales come from a thermostat run on the synthetic scenario, as in simulate.
  auto offline = cfg;
  offline.weather.source = app::WeatherSource::Synthetic;
  const auto baseline = app::simulate(offline, plant::ControllerKind::Thermostat, app::make_weather(offline), nullptr);
  const auto scales = mpc::default_scales(baseline.log, cfg.comfort, cfg.penalties, cfg.horizon);
  std::vector<std::uint8_t> pattern;
  for (int it = 0; it < iterations; ++it) {
    const auto frame = io::load_frame(state_csv, cfg.step());
    const std::size_t n = frame.length();
    mpc::MPCState state;
    state.now = frame.grid().at(n - 1);
    for (std::size_t t = 0; t < n; ++t) {
      state.t_in.push_back(frame.at(channel::kRoomTemp, t));
      if (t + 1 < n) {
        state.power.push_back(frame.at(channel::kPower, t));
        state.t_out.push_back(frame.at(channel::kAmbientTemp, t));
      }
    }
    mpc::Forecasts fc;
    fc.t_out = provider->get_forecast(state.now, cfg.horizon);
    const auto problem = mpc::build_problem(state, fc, models.thermal, models.hvac, cfg.comfort, cfg.penalties,
                                            scales, cfg.horizon, cfg.step());
    const auto warm = mpc::shift_pattern(pattern);
    const auto sol = mpc::branch_and_bound(problem, cfg.bnb, pattern.empty() ? nullptr : &warm);
    pattern = sol.on;
    const auto cmd = mpc::receding_horizon_step(sol);
    io::Json j = {{"time", format_iso8601(state.now)}, {"on", cmd.on}, {"power_kw", cmd.power}};
    j["setpoint_c"] = cmd.setpoint ? io::Json(*cmd.setpoint) : io::Json(nullptr);
    std::cout << j.dump() << std::endl;
    if (it + 1 < iterations) std::this_thread::sleep_for(cfg.step());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven HVAC control: symbolic-regression room model, PWL HVAC model, MIQP MPC"};
  app.require_subcommand(1);
  Common common;
  std::string controller = "mpc", run_dir, state_csv;
  bool dry_run = false, use_models = false;
  int iterations = 1;

  auto* config = app.add_subcommand("config", "configuration helpers");
  auto* init = config->add_subcommand("init", "print the commented default configuration");
  init->add_option("--out", common.out, "write to this file instead of stdout");
  config->require_subcommand(1);

  auto* train = app.add_subcommand("train-srm", "fit the room-temperature model by symbolic regression");
  add_common(train, common);
  auto* fit = app.add_subcommand("fit-hvac", "fit piecewise-linear capacity/power curves");
  add_common(fit, common);
  auto* sim = app.add_subcommand("simulate", "closed-loop run of one controller on the synthetic plant");
  add_common(sim, common);
  sim->add_option("--controller", controller, "mpc or thermostat")->check(CLI::IsMember({"mpc", "thermostat"}));
  sim->add_flag("--dry-run", dry_run, "validate and print the plan without running");
  auto* cmp = app.add_subcommand("compare", "train, fit and run both controllers on identical weather");
  add_common(cmp, common);
  cmp->add_flag("--use-models", use_models, "load models from the model directory instead of training");
  auto* rep = app.add_subcommand("report", "re-emit metrics and charts for a run directory");
  add_common(rep, common);
  rep->add_option("--run", run_dir, "run directory holding mpc.csv / thermostat.csv")->required();
  auto* ctl = app.add_subcommand("control", "online decisions against the configured forecast source");
  add_common(ctl, common);
  ctl->add_option("--state", state_csv, "measured history CSV; the last row is the current step")->required();
  ctl->add_option("--iterations", iterations, "decisions to make, one per step")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "ERR2 config: %s\n", e.what());
    return 2;
  }

  try {
    if (init->parsed()) return cmd_config_init(common);
    if (train->parsed()) return cmd_train_srm(common);
    if (fit->parsed()) return cmd_fit_hvac(common);
    if (sim->parsed()) return cmd_simulate(common, controller, dry_run);
    if (cmp->parsed()) return cmd_compare(common, use_models);
    if (rep->parsed()) return cmd_report(common, run_dir);
    if (ctl->parsed()) return cmd_control(common, state_csv, iterations);
  } catch (const Error& e) {
    std::string msg = e.what();
    for (auto& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    std::fprintf(stderr, "ERR%d %s: %s\n", e.exit_code(), error_kind_name(e.kind()), msg.c_str());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ERR1 internal: %s\n", e.what());
    return 1;
  }
  return 0;
}
