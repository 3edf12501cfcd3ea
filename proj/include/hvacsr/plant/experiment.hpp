#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hvacsr/core/comfort.hpp"
#include "hvacsr/core/experiment_log.hpp"
#include "hvacsr/core/lag_features.hpp"
#include "hvacsr/hvac/hvac_model.hpp"
#include "hvacsr/io/forecast.hpp"
#include "hvacsr/mpc/problem.hpp"
#include "hvacsr/plant/rc_model.hpp"
#include "hvacsr/plant/thermostat.hpp"
#include "hvacsr/sr/affine_model.hpp"

namespace hvacsr::plant {

/// Internal gains while occupied plus a half-sine solar gain over the day.
struct GainProfile {
  double internal_kw = 0.4;
  double solar_peak_kw = 0.8;
  DailyWindow occupied = DailyWindow::hours(7, 18);
  DailyWindow daylight = DailyWindow::hours(7, 17);
  Seconds utc_offset{0};

  double at(Timestamp ts) const;
};

struct WeatherProfile {
  double mean_c = 3.0;
  double amplitude_c = 3.0;    // half of the daily swing, coldest near 05:00
  double day_jitter_c = 1.5;   // std of the day-to-day mean offset
  double noise_c = 0.2;        // std of an AR(1) wiggle
};

/// Seeded synthetic ambient temperature on a uniform grid (T_out channel only).
SeriesFrame synthetic_weather(const TimeGrid& grid, const WeatherProfile& profile, std::uint64_t seed);

enum class ControllerKind { Mpc, Thermostat };
std::string to_string(ControllerKind kind);
ControllerKind parse_controller(std::string_view text);

struct MpcSetup {
  sr::AffineModel thermal;
  hvac::HVACModel hvac;
  mpc::PenaltyConfig penalties;
  mpc::NormalizationScales scales;
  int horizon = 96;
  mpc::BranchAndBoundSettings bnb;
};

struct ExperimentConfig {
  Timestamp start{};      // first evaluated step
  int days = 1;
  int preroll_days = 2;   // thermostat operation before `start`, builds the lag history
  Seconds step = kDefaultStep;
  RCParameters rc;
  RCState initial{18.0, 18.0};
  GainProfile gains;
  ThermostatConfig thermostat;
  ComfortSpec comfort;
  double setpoint_excitation = 0.0;  // uniform +/- range on the thermostat setpoint
  Seconds excitation_hold{7200};
  std::uint64_t seed = 0;

  void validate() const;
  TimeGrid evaluation_grid() const;
  TimeGrid full_grid() const;  // preroll + evaluation
};

/// Closed loop at the config step. `plant_hvac` maps logged power to delivered capacity.
/// `weather` carries the realized T_out and must cover the evaluation window plus the MPC
/// horizon; `forecasts` defaults to a zero-error replay of it. A failed MPC solve is logged
/// and the previous command is held.
ExperimentLog run_experiment(ControllerKind controller, const ExperimentConfig& config,
                             const hvac::HVACModel& plant_hvac, const SeriesFrame& weather,
                             const MpcSetup* mpc = nullptr, io::ForecastProvider* forecasts = nullptr);

/// Thermostat operation with setpoint excitation over `days`, starting at config.start.
SeriesFrame generate_training_data(const ExperimentConfig& config, const hvac::HVACModel& plant_hvac,
                                   const SeriesFrame& weather, int days);

}  // namespace hvacsr::plant
