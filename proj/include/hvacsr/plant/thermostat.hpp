#pragma once

#include "hvacsr/core/time.hpp"
#include "hvacsr/hvac/hvac_model.hpp"

namespace hvacsr::plant {

struct ThermostatConfig {
  double setpoint = 20.0;
  double deadband = 0.5;
  DailyWindow operating_window = DailyWindow::hours(7, 18);
  hvac::HvacMode mode = hvac::HvacMode::Heating;
  Seconds utc_offset{0};

  void validate() const;
};

struct ThermostatState {
  bool on = false;
};

/// Hysteresis on setpoint +/- deadband inside the operating window, off outside it.
bool thermostat_step(const ThermostatConfig& config, ThermostatState& state, double t_in, Timestamp now,
                     double setpoint);
inline bool thermostat_step(const ThermostatConfig& config, ThermostatState& state, double t_in, Timestamp now) {
  return thermostat_step(config, state, t_in, now, config.setpoint);
}

}  // namespace hvacsr::plant
