#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hvacsr/app/config.hpp"
#include "hvacsr/plant/metrics.hpp"

namespace hvacsr::app {

/// Realized ambient temperature from the training window through the evaluation days plus
/// one MPC horizon.
SeriesFrame make_weather(const RunConfig& config);

/// Loaded from paths.training_data, or thermostat operation with setpoint excitation on the plant.
SeriesFrame training_frame(const RunConfig& config, const SeriesFrame& weather);

struct TrainOutcome {
  sr::AffineModel model;
  std::vector<sr::ParetoFront> fronts;
  io::Json report;
};

TrainOutcome train_srm(const RunConfig& config, const SeriesFrame& training);

struct HvacFitOutcome {
  hvac::HVACModel model;
  io::Json report;
};

/// Per-level PWL fit of catalog points (or noisy samples of the plant's own curves).
HvacFitOutcome fit_hvac(const RunConfig& config);

/// Ground-truth unit driven by the plant.
hvac::HVACModel plant_hvac();

plant::ExperimentConfig experiment_config(const RunConfig& config);
plant::MetricsConfig metrics_config(const RunConfig& config);

struct Models {
  sr::AffineModel thermal;
  hvac::HVACModel hvac;
};

/// Both models from model_dir; a missing file raises ConfigError naming the command that writes it.
Models load_models(const RunConfig& config);

struct SimulationOutcome {
  ExperimentLog log;
  plant::MetricsReport metrics;
  std::optional<mpc::NormalizationScales> scales;
};

/// An MPC run first runs the thermostat on the same plant and weather to derive its scales.
SimulationOutcome simulate(const RunConfig& config, plant::ControllerKind controller, const SeriesFrame& weather,
                           const Models* models);

struct CompareOutcome {
  SimulationOutcome baseline;
  SimulationOutcome proposed;
  double peak_reduction = 0.0;
  double energy_delta = 0.0;
  io::Json summary;
};

CompareOutcome compare(const RunConfig& config, const SeriesFrame& weather, const Models& models);

/// <output_dir>/<command>-<start as YYYYMMDDTHHMM>-s<seed>
std::filesystem::path run_directory(const RunConfig& config, const std::string& command);

/// run.json: command, seed, config hash and the resolved configuration.
void write_run_metadata(const RunConfig& config, const std::string& command, const std::filesystem::path& dir);

}  // namespace hvacsr::app
