#include "hvacsr/plant/experiment.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "hvacsr/core/error.hpp"

namespace hvacsr::plant {

double GainProfile::at(Timestamp ts) const {
  double g = occupied.contains(ts, utc_offset) ? internal_kw : 0.0;
  if (daylight.contains(ts, utc_offset) && daylight.start_minute < daylight.end_minute) {
    const double frac = static_cast<double>(minute_of_day(ts, utc_offset) - daylight.start_minute) /
                        static_cast<double>(daylight.end_minute - daylight.start_minute);
    g += solar_peak_kw * std::sin(std::numbers::pi * frac);
  }
  return g;
}

SeriesFrame synthetic_weather(const TimeGrid& grid, const WeatherProfile& w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double day_s = 86400.0;
  const auto t0 = grid.start().time_since_epoch().count();
  const auto n_days = static_cast<std::size_t>(std::ceil(static_cast<double>(grid.length()) * grid.step_hours() / 24.0)) + 2;
  std::vector<double> offsets(n_days);
  for (auto& o : offsets) o = w.day_jitter_c * unit(rng);

  Eigen::VectorXd t(static_cast<Eigen::Index>(grid.length()));
  double wiggle = 0.0;
  const double phi = 0.95;
  for (std::size_t k = 0; k < grid.length(); ++k) {
    const double secs = static_cast<double>(grid.at(k).time_since_epoch().count() - t0);
    // Day offsets pinned at local noon and blended linearly in between.
    const double pos = (secs + 12.0 * 3600.0) / day_s;
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - std::floor(pos);
    const double offset = (1.0 - frac) * offsets[i] + frac * offsets[i + 1];
    const double hour = static_cast<double>(minute_of_day(grid.at(k), Seconds{0})) / 60.0;
    wiggle = phi * wiggle + std::sqrt(1.0 - phi * phi) * w.noise_c * unit(rng);
    t[static_cast<Eigen::Index>(k)] =
        w.mean_c + offset - w.amplitude_c * std::cos(2.0 * std::numbers::pi * (hour - 5.0) / 24.0) + wiggle;
  }
  SeriesFrame f(grid);
  f.set_channel(channel::kAmbientTemp, std::move(t));
  return f;
}

std::string to_string(ControllerKind kind) { return kind == ControllerKind::Mpc ? "mpc" : "thermostat"; }

ControllerKind parse_controller(std::string_view text) {
  if (text == "mpc") return ControllerKind::Mpc;
  if (text == "thermostat") return ControllerKind::Thermostat;
  throw ConfigError("unknown controller '" + std::string(text) + "' (expected mpc or thermostat)");
}

void ExperimentConfig::validate() const {
  if (days < 1) throw ConfigError("experiment must cover at least one day");
  if (preroll_days < 0) throw ConfigError("preroll days must be non-negative");
  if (step.count() <= 0 || 86400 % step.count() != 0) throw ConfigError("step must divide one day");
  if (setpoint_excitation < 0.0) throw ConfigError("setpoint excitation must be non-negative");
  if (excitation_hold.count() <= 0) throw ConfigError("excitation hold must be positive");
  rc.validate();
  thermostat.validate();
  comfort.validate();
}

TimeGrid ExperimentConfig::evaluation_grid() const {
  return TimeGrid(start, step, static_cast<std::size_t>(days * 86400 / step.count()));
}

TimeGrid ExperimentConfig::full_grid() const {
  const auto pre = static_cast<std::size_t>(preroll_days * 86400 / step.count());
  return TimeGrid(start - step * static_cast<long>(pre), step, pre + evaluation_grid().length());
}

namespace {

double weather_at(const SeriesFrame& weather, Timestamp ts) {
  const auto i = weather.grid().index_of(ts);
  if (!i || weather.is_missing(channel::kAmbientTemp, *i)) {
    throw DataError("weather does not cover " + format_iso8601(ts));
  }
  return weather.at(channel::kAmbientTemp, *i);
}

// Power actually drawn for a commanded power: zero or clamped into the on range.
double realizable_power(const hvac::HVACModel& m, double d, double t_out) {
  if (d <= 0.0) return 0.0;
  return std::clamp(d, m.min_on_power(t_out), m.max_on_power(t_out));
}

}  // namespace

ExperimentLog run_experiment(ControllerKind controller, const ExperimentConfig& config,
                             const hvac::HVACModel& plant_hvac, const SeriesFrame& weather, const MpcSetup* mpc,
                             io::ForecastProvider* forecasts) {
  config.validate();
  if (controller == ControllerKind::Mpc && mpc == nullptr) throw ConfigError("MPC run needs a thermal and HVAC model");
  if (!weather.has_channel(channel::kAmbientTemp)) throw DataError("weather frame has no T_out channel");

  const TimeGrid full = config.full_grid();
  const TimeGrid eval = config.evaluation_grid();
  const std::size_t pre = full.length() - eval.length();
  const RCModel rc(config.rc, config.step);
  const double sign = plant_hvac.mode() == hvac::HvacMode::Heating ? 1.0 : -1.0;

  std::optional<io::FileReplayProvider> replay;
  if (forecasts == nullptr && controller == ControllerKind::Mpc) {
    replay.emplace(weather);
    forecasts = &*replay;
  }

  const auto n = static_cast<Eigen::Index>(eval.length());
  Eigen::VectorXd log_tin(n), log_tout(n), log_d(n), log_q(n), log_occ(n), log_sp(n);
  std::vector<bool> sp_missing(static_cast<std::size_t>(n), true);
  std::vector<SolveRecord> solves;

  mpc::MPCState hist;
  RCState x = config.initial;
  ThermostatState tstat;
  std::mt19937_64 excite(config.seed);
  std::uniform_real_distribution<double> excite_draw(-config.setpoint_excitation, config.setpoint_excitation);
  double setpoint = config.thermostat.setpoint;
  const auto hold_steps = std::max<std::size_t>(1, static_cast<std::size_t>(config.excitation_hold / config.step));
  double previous_d = 0.0;
  std::vector<std::uint8_t> pattern;

  for (std::size_t k = 0; k < full.length(); ++k) {
    const Timestamp ts = full.at(k);
    const double t_out = weather_at(weather, ts);
    const double gains = config.gains.at(ts);
    const bool evaluating = k >= pre;
    hist.now = ts;
    hist.t_in.push_back(x.t_i);

    if (config.setpoint_excitation > 0.0 && k % hold_steps == 0) {
      setpoint = config.thermostat.setpoint + excite_draw(excite);
    }

    double d = 0.0;
    std::optional<double> command_sp;
    if (!evaluating || controller == ControllerKind::Thermostat) {
      if (thermostat_step(config.thermostat, tstat, x.t_i, ts, setpoint)) {
        // Modulating unit: deadbeat capacity toward the setpoint within the unit's range.
        const double need = sign * rc.capacity_for(x, t_out, gains, setpoint);
        const double q = std::clamp(need, plant_hvac.q_min(), plant_hvac.q_max());
        d = hvac::capacity_to_power(plant_hvac, q, t_out);
        command_sp = setpoint;
      }
    } else {
      SolveRecord rec;
      rec.time = ts;
      try {
        mpc::Forecasts fc;
        fc.t_out = forecasts->get_forecast(ts, mpc->horizon);
        const auto problem = mpc::build_problem(hist, fc, mpc->thermal, mpc->hvac, config.comfort, mpc->penalties,
                                                mpc->scales, mpc->horizon, config.step);
        const auto warm = mpc::shift_pattern(pattern);
        auto sol = mpc::branch_and_bound(problem, mpc->bnb, pattern.empty() ? nullptr : &warm);
        const auto cmd = mpc::receding_horizon_step(sol);
        d = cmd.power;
        command_sp = cmd.setpoint;
        pattern = sol.on;
        rec.objective = sol.objective;
        rec.terms = sol.terms;
        rec.nodes = sol.stats.nodes;
        rec.qp_iterations = sol.stats.qp_iterations;
        rec.wall_ms = sol.stats.wall_ms;
      } catch (const SolverError&) {
        rec.ok = false;
        d = previous_d;
      }
      solves.push_back(rec);
    }

    d = realizable_power(plant_hvac, d, t_out);
    const double q = d > 0.0 ? hvac::power_to_capacity(plant_hvac, d, t_out) : 0.0;
    if (evaluating) {
      const auto i = static_cast<Eigen::Index>(k - pre);
      log_tin[i] = x.t_i;
      log_tout[i] = t_out;
      log_d[i] = d;
      log_q[i] = q;
      log_occ[i] = config.comfort.occupied(ts) ? 1.0 : 0.0;
      log_sp[i] = command_sp.value_or(std::numeric_limits<double>::quiet_NaN());
      sp_missing[static_cast<std::size_t>(i)] = !command_sp.has_value();
    }
    hist.power.push_back(d);
    hist.t_out.push_back(t_out);
    previous_d = d;
    x = rc.advance(x, {t_out, sign * q, gains});
  }

  SeriesFrame frame(eval);
  frame.set_channel(channel::kRoomTemp, log_tin);
  frame.set_channel(channel::kAmbientTemp, log_tout);
  frame.set_channel(channel::kPower, log_d);
  frame.set_channel(channel::kCapacity, log_q);
  frame.set_channel(channel::kOccupancy, log_occ);
  frame.set_channel(channel::kSetpoint, log_sp, sp_missing);
  ExperimentLog log(std::move(frame), to_string(controller), config.seed);
  log.solves = std::move(solves);
  return log;
}

SeriesFrame generate_training_data(const ExperimentConfig& config, const hvac::HVACModel& plant_hvac,
                                   const SeriesFrame& weather, int days) {
  ExperimentConfig c = config;
  c.days = days;
  return run_experiment(ControllerKind::Thermostat, c, plant_hvac, weather).frame;
}

}  // namespace hvacsr::plant
