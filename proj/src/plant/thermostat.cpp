#include "hvacsr/plant/thermostat.hpp"

#include <cmath>

#include "hvacsr/core/error.hpp"

namespace hvacsr::plant {

void ThermostatConfig::validate() const {
  if (!(deadband > 0.0)) throw ConfigError("thermostat deadband must be positive");
  if (!std::isfinite(setpoint)) throw ConfigError("thermostat setpoint must be finite");
}

bool thermostat_step(const ThermostatConfig& config, ThermostatState& state, double t_in, Timestamp now,
                     double setpoint) {
  if (!config.operating_window.contains(now, config.utc_offset)) {
    state.on = false;
    return false;
  }
  // Error measured in the direction the unit pushes the room.
  const double need = config.mode == hvac::HvacMode::Heating ? setpoint - t_in : t_in - setpoint;
  if (need > config.deadband) {
    state.on = true;
  } else if (need < -config.deadband) {
    state.on = false;
  }
  return state.on;
}

}  // namespace hvacsr::plant
