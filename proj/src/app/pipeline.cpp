#include "hvacsr/app/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "hvacsr/core/error.hpp"
#include "hvacsr/io/csv.hpp"

namespace hvacsr::app {

namespace {

constexpr std::chrono::hours kDay{24};

std::string two_sig(double pct) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", pct);
  return buf;
}

}  // namespace

hvac::HVACModel plant_hvac() { return hvac::synthetic_heating_model(); }

SeriesFrame make_weather(const RunConfig& c) {
  switch (c.weather.source) {
    case WeatherSource::Replay: {
      auto f = io::load_frame(c.weather.replay_file, c.step());
      if (!f.has_channel(channel::kAmbientTemp)) throw DataError(c.weather.replay_file.string() + ": no T_out column");
      if (f.grid().step() != c.step()) throw DataError("replay weather step differs from experiment.step_minutes");
      return f;
    }
    case WeatherSource::Http:
      throw ConfigError("weather.source = http is only used by the control command");
    case WeatherSource::Synthetic:
      break;
  }
  const Timestamp from = c.start - kDay * (c.training_days + c.preroll_days);
  const Timestamp to = c.start + kDay * (c.days + 1) + c.step() * c.horizon;
  const auto n = static_cast<std::size_t>((to - from) / c.step());
  return plant::synthetic_weather(TimeGrid(from, c.step(), n), c.weather.profile, weather_seed(c));
}

plant::ExperimentConfig experiment_config(const RunConfig& c) {
  plant::ExperimentConfig e;
  e.start = c.start;
  e.days = c.days;
  e.preroll_days = c.preroll_days;
  e.step = c.step();
  e.rc = c.rc;
  e.initial = c.initial;
  e.gains = c.gains;
  e.thermostat = c.thermostat;
  e.comfort = c.comfort;
  e.seed = c.seed;
  return e;
}

plant::MetricsConfig metrics_config(const RunConfig& c) {
  plant::MetricsConfig m;
  m.peak_window = c.penalties.peak_window;
  m.utc_offset = c.utc_offset();
  return m;
}

SeriesFrame training_frame(const RunConfig& c, const SeriesFrame& weather) {
  if (!c.training_data.empty()) return io::load_frame(c.training_data, c.step());
  auto e = experiment_config(c);
  e.start = c.start - kDay * c.training_days;
  e.setpoint_excitation = c.setpoint_excitation;
  e.excitation_hold = Seconds{c.excitation_hold_minutes * 60};
  e.seed = excitation_seed(c);
  return plant::generate_training_data(e, plant_hvac(), weather, c.training_days);
}

TrainOutcome train_srm(const RunConfig& c, const SeriesFrame& training) {
  const auto data = build_lag_features(training, c.lags, c.lag_channels);
  auto gp = c.gp;
  gp.rng_seed = gp_seed(c);
  TrainOutcome out;
  out.fronts = sr::run_gp_restarts(data, gp);
  const auto sel = sr::select_best(out.fronts, gp.parsimony, data.columns);
  out.model = sel.model;

  io::Json restarts = io::Json::array();
  for (std::size_t r = 0; r < out.fronts.size(); ++r) {
    io::Json front = io::Json::array();
    for (const auto& e : out.fronts[r].entries()) {
      front.push_back({{"complexity", e.complexity},
                       {"mse", e.mse},
                       {"equation", sr::to_affine(e.expr, data.columns).equation(4)},
                       {"expression", e.expr.to_string(data.column_names())}});
    }
    restarts.push_back({{"restart", r}, {"seed", gp.rng_seed + r}, {"front", front}});
  }
  out.report = {{"rows", data.x.rows()},
                {"features", data.column_names()},
                {"selected",
                 {{"restart", sel.front_index},
                  {"complexity", sel.model.complexity},
                  {"mse", sel.model.training_mse},
                  {"equation", sel.model.equation(4)}}},
                {"restarts", restarts}};
  return out;
}

namespace {

std::map<double, std::vector<hvac::CapacityPowerPoint>> read_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("t_out_c,capacity_kw,power_kw", 0) != 0) {
    throw DataError(path.string() + ":1: header must be t_out_c,capacity_kw,power_kw");
  }
  std::map<double, std::vector<hvac::CapacityPowerPoint>> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    double t = 0, q = 0, d = 0;
    char c1 = 0, c2 = 0;
    if (!(row >> t >> c1 >> q >> c2 >> d) || c1 != ',' || c2 != ',') {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
    }
    out[t].push_back({q, d});
  }
  if (out.empty()) throw DataError(path.string() + ": no catalog rows");
  return out;
}

}  // namespace

HvacFitOutcome fit_hvac(const RunConfig& c) {
  const auto truth = plant_hvac();
  std::map<double, std::vector<hvac::CapacityPowerPoint>> points;
  if (!c.hvac_fit.catalog.empty()) {
    points = read_catalog(c.hvac_fit.catalog);
  } else {
    std::mt19937_64 rng(hvac_fit_seed(c));
    std::normal_distribution<double> noise(0.0, c.hvac_fit.noise_kw);
    const int n = c.hvac_fit.samples_per_level;
    for (const auto& level : truth.levels()) {
      auto& pts = points[level.t_out_c];
      for (int k = 0; k < n; ++k) {
        const double q = truth.q_min() + (truth.q_max() - truth.q_min()) * k / (n - 1);
        pts.push_back({q, std::max(0.0, hvac::capacity_to_power(truth, q, level.t_out_c) + noise(rng))});
      }
    }
  }
  std::vector<hvac::AmbientLevel> levels;
  io::Json report_levels = io::Json::array();
  for (const auto& [t_out, pts] : points) {
    auto curve = hvac::fit_pwl(pts, c.hvac_fit.segments);
    report_levels.push_back({{"t_out_c", t_out},
                             {"points", pts.size()},
                             {"residual", hvac::pwl_residual(curve, pts)},
                             {"knots", curve.knots()}});
    levels.push_back({t_out, std::move(curve)});
  }
  hvac::HVACModel model(std::move(levels), truth.q_max(), truth.rated_power(), truth.load_min(), truth.mode());
  io::Json report = {{"source", c.hvac_fit.catalog.empty() ? "synthetic" : c.hvac_fit.catalog.string()},
                     {"segments", c.hvac_fit.segments},
                     {"q_min_kw", model.q_min()},
                     {"q_max_kw", model.q_max()},
                     {"levels", report_levels}};
  return {std::move(model), std::move(report)};
}

Models load_models(const RunConfig& c) {
  const auto thermal = c.thermal_model_path();
  const auto hv = c.hvac_model_path();
  if (!std::filesystem::exists(thermal)) {
    throw ConfigError("missing " + thermal.string() + "; run `hvacsr train-srm` first");
  }
  if (!std::filesystem::exists(hv)) throw ConfigError("missing " + hv.string() + "; run `hvacsr fit-hvac` first");
  return {io::affine_model_from_json(io::read_json(thermal)), io::hvac_model_from_json(io::read_json(hv))};
}

namespace {

SimulationOutcome run_mpc(const RunConfig& c, const SeriesFrame& weather, const Models& models,
                          const ExperimentLog& baseline) {
  plant::MpcSetup setup{models.thermal, models.hvac, c.penalties, {}, c.horizon, c.bnb};
  setup.scales = mpc::default_scales(baseline, c.comfort, c.penalties, c.horizon);
  io::FileReplayProvider forecasts(weather, {c.weather.forecast_bias_c, c.weather.forecast_noise_c, forecast_seed(c)});
  auto log = plant::run_experiment(plant::ControllerKind::Mpc, experiment_config(c), plant_hvac(), weather, &setup,
                                   &forecasts);
  auto m = plant::metrics(log, c.comfort, metrics_config(c));
  return {std::move(log), m, setup.scales};
}

SimulationOutcome run_thermostat(const RunConfig& c, const SeriesFrame& weather) {
  auto log = plant::run_experiment(plant::ControllerKind::Thermostat, experiment_config(c), plant_hvac(), weather);
  auto m = plant::metrics(log, c.comfort, metrics_config(c));
  return {std::move(log), m, std::nullopt};
}

}  // namespace

SimulationOutcome simulate(const RunConfig& c, plant::ControllerKind controller, const SeriesFrame& weather,
                           const Models* models) {
  auto baseline = run_thermostat(c, weather);
  if (controller == plant::ControllerKind::Thermostat) return baseline;
  if (models == nullptr) throw ConfigError("MPC simulation needs trained models");
  return run_mpc(c, weather, *models, baseline.log);
}

CompareOutcome compare(const RunConfig& c, const SeriesFrame& weather, const Models& models) {
  auto baseline = run_thermostat(c, weather);
  auto proposed = run_mpc(c, weather, models, baseline.log);
  CompareOutcome out{std::move(baseline), std::move(proposed), 0.0, 0.0, {}};
  out.peak_reduction = plant::peak_reduction(out.baseline.metrics, out.proposed.metrics);
  out.energy_delta = plant::energy_delta(out.baseline.metrics, out.proposed.metrics);
  io::Json runs = io::Json::array();
  for (const auto* r : {&out.proposed, &out.baseline}) {
    auto j = io::to_json(r->metrics);
    j["seed"] = r->log.seed;
    j["failed_solves"] = std::count_if(r->log.solves.begin(), r->log.solves.end(), [](const auto& s) { return !s.ok; });
    runs.push_back(j);
  }
  out.summary = {{"config_hash", config_hash(c)},
                 {"seed", c.seed},
                 {"start", format_iso8601(c.start)},
                 {"days", c.days},
                 {"thermal_model", models.thermal.equation(4)},
                 {"runs", runs},
                 {"peak_reduction_pct", 100.0 * out.peak_reduction},
                 {"energy_delta_pct", 100.0 * out.energy_delta},
                 {"peak_reduction_display", two_sig(100.0 * out.peak_reduction) + "%"},
                 {"energy_delta_display", two_sig(100.0 * out.energy_delta) + "%"}};
  return out;
}

std::filesystem::path run_directory(const RunConfig& c, const std::string& command) {
  const auto days = std::chrono::floor<std::chrono::days>(c.start);
  const std::chrono::year_month_day ymd(days);
  const std::chrono::hh_mm_ss hms(c.start - days);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-%04d%02u%02uT%02ld%02ld-s%llu", command.c_str(), static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<unsigned long long>(c.seed));
  return c.output_dir / buf;
}

void write_run_metadata(const RunConfig& c, const std::string& command, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  io::Json j = {{"command", command}, {"seed", c.seed}, {"config_hash", config_hash(c)}, {"config", to_json(c)}};
  io::write_json(j, dir / "run.json");
}

}  // namespace hvacsr::app
