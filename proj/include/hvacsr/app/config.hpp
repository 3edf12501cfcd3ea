#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hvacsr/core/comfort.hpp"
#include "hvacsr/core/lag_features.hpp"
#include "hvacsr/io/forecast.hpp"
#include "hvacsr/io/json_io.hpp"
#include "hvacsr/io/weather.hpp"
#include "hvacsr/mpc/problem.hpp"
#include "hvacsr/plant/experiment.hpp"
#include "hvacsr/sr/gp.hpp"

namespace hvacsr::app {

enum class WeatherSource { Synthetic, Replay, Http };

struct WeatherConfig {
  WeatherSource source = WeatherSource::Synthetic;
  std::filesystem::path replay_file;  // CSV with a T_out column, for source = replay
  plant::WeatherProfile profile;
  double forecast_bias_c = 0.0;
  double forecast_noise_c = 0.0;
  io::WeatherHttpConfig http;
};

struct HvacFitConfig {
  std::filesystem::path catalog;  // CSV t_out_c,capacity_kw,power_kw; empty samples the plant's curves
  int segments = 2;
  int samples_per_level = 60;
  double noise_kw = 0.02;
};

struct RunConfig {
  std::uint64_t seed = 42;
  std::filesystem::path training_data;  // empty: synthesize from the plant
  std::filesystem::path model_dir = "models";
  std::filesystem::path output_dir = "runs";

  Timestamp start = make_timestamp(2023, 1, 16, 0, 0);
  int days = 1;
  int preroll_days = 2;
  int training_days = 14;
  int step_minutes = 15;
  double setpoint_excitation = 1.5;
  int excitation_hold_minutes = 120;
  int utc_offset_minutes = 0;

  WeatherConfig weather;
  LagSpec lags;
  std::vector<std::string> lag_channels{"T_in", "D", "T_out"};
  sr::GPConfig gp;
  ComfortSpec comfort;
  mpc::PenaltyConfig penalties;
  int horizon = 96;
  mpc::BranchAndBoundSettings bnb;
  plant::ThermostatConfig thermostat;
  plant::RCParameters rc;
  plant::RCState initial{18.0, 18.0};
  plant::GainProfile gains;
  HvacFitConfig hvac_fit;
  bool include_timing = false;

  void validate() const;
  Seconds step() const { return Seconds{step_minutes * 60}; }
  Seconds utc_offset() const { return Seconds{utc_offset_minutes * 60}; }
  std::filesystem::path thermal_model_path() const { return model_dir / "thermal_model.json"; }
  std::filesystem::path hvac_model_path() const { return model_dir / "hvac_model.json"; }
};

/// Unknown keys and wrong types raise ConfigError naming the offending key.
RunConfig config_from_json(const io::Json& j);
io::Json to_json(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);

/// Commented default configuration, as printed by `config init`.
std::string default_config_text();

/// FNV-1a 64 over the canonical JSON of the resolved configuration, as 16 hex digits.
std::string config_hash(const RunConfig& config);

// Seeds of the independent random streams, all derived from RunConfig::seed.
std::uint64_t weather_seed(const RunConfig& c);
std::uint64_t excitation_seed(const RunConfig& c);
std::uint64_t gp_seed(const RunConfig& c);
std::uint64_t hvac_fit_seed(const RunConfig& c);
std::uint64_t forecast_seed(const RunConfig& c);

}  // namespace hvacsr::app
