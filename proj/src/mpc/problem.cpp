#include "hvacsr/mpc/problem.hpp"

#include <cmath>
#include <sstream>

#include "hvacsr/core/error.hpp"

namespace hvacsr::mpc {

void PenaltyConfig::validate() const {
  if (!(slack_penalty > 0.0)) throw ConfigError("slack penalty must be positive");
  if (!(gamma_peak > 1.0)) throw ConfigError("peak ramp weight must exceed 1");
}

Eigen::VectorXd PenaltyConfig::ramp_weights(const TimeGrid& grid) const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(grid.length()));
  for (std::size_t t = 0; t < grid.length(); ++t) w[static_cast<Eigen::Index>(t)] = gamma_at(grid.at(t));
  return w;
}

void NormalizationScales::validate() const {
  if (!(energy_scale > 0 && comfort_scale > 0 && ramp_scale > 0 && slack_scale > 0)) {
    throw ConfigError("normalization scales must be strictly positive");
  }
}

void MPCProblem::validate() const {
  const auto T = static_cast<Eigen::Index>(horizon);
  if (horizon < 1) throw SolverError("horizon must be at least one step");
  if (free_response.size() != T + 1 || response.rows() != T + 1 || response.cols() != T ||
      occupancy.size() != T + 1 || lower.size() != T + 1 || upper.size() != T + 1 || ramp_weight.size() != T ||
      d_min.size() != T || d_max.size() != T) {
    throw SolverError("problem arrays do not match the horizon");
  }
  scales.validate();
}

Eigen::VectorXd occupancy_forecast(const ComfortSpec& comfort, Timestamp now, int horizon, Seconds step) {
  Eigen::VectorXd occ = Eigen::VectorXd::Zero(horizon + 1);
  for (int t = 1; t <= horizon; ++t) occ[t] = comfort.occupied(now + step * t) ? 1.0 : 0.0;
  return occ;
}

namespace {

// Affine expression of a predicted temperature in the decision powers.
struct AffineRow {
  double constant = 0.0;
  Eigen::RowVectorXd coef;
};

}  // namespace

MPCProblem build_problem(const MPCState& state, const Forecasts& fc, const sr::AffineModel& thermal,
                         const hvac::HVACModel& hvac_model, const ComfortSpec& comfort, const PenaltyConfig& penalties,
                         const NormalizationScales& scales, int horizon, Seconds step) {
  if (horizon < 1) throw ConfigError("horizon must be at least one step");
  penalties.validate();
  scales.validate();
  comfort.validate();
  const auto T = static_cast<Eigen::Index>(horizon);
  if (fc.t_out.size() < T) {
    throw DataError("ambient forecast covers " + std::to_string(fc.t_out.size()) + " of " + std::to_string(T) +
                    " steps");
  }
  if (state.t_in.empty()) throw DataError("state lacks the current room temperature");

  // History sufficiency, reported per missing lag.
  std::ostringstream missing;
  for (const auto& term : thermal.terms) {
    const auto& ch = term.column.channel;
    const auto lag = static_cast<std::size_t>(term.column.lag);
    if (ch == channel::kRoomTemp) {
      if (state.t_in.size() < lag + 1) missing << " " << term.column.name();
    } else if (ch == channel::kPower) {
      if (state.power.size() < lag) missing << " " << term.column.name();
    } else if (ch == channel::kAmbientTemp) {
      if (state.t_out.size() < lag) missing << " " << term.column.name();
    } else {
      throw ConfigError("thermal model channel '" + ch + "' is not supported in the MPC (use T_in, D, T_out)");
    }
  }
  if (!missing.str().empty()) throw DataError("insufficient lag history for:" + missing.str());

  MPCProblem p;
  p.grid = TimeGrid(state.now, step, static_cast<std::size_t>(horizon));
  p.horizon = horizon;
  p.comfort_temp = comfort.comfort_temp;
  p.previous_power = state.power.empty() ? 0.0 : state.power.back();
  p.penalties = penalties;
  p.scales = scales;

  std::vector<AffineRow> temp(static_cast<std::size_t>(T + 1));
  temp[0] = {state.t_in.back(), Eigen::RowVectorXd::Zero(T)};
  const auto hist = [](const std::vector<double>& v, Eigen::Index back_offset) {
    // back_offset = 1 is the newest element.
    return v[v.size() - static_cast<std::size_t>(back_offset)];
  };
  for (Eigen::Index t = 0; t < T; ++t) {
    AffineRow next{thermal.intercept, Eigen::RowVectorXd::Zero(T)};
    for (const auto& term : thermal.terms) {
      const auto idx = t - term.column.lag;
      const double c = term.coefficient;
      const auto& ch = term.column.channel;
      if (ch == channel::kRoomTemp) {
        if (idx >= 0) {
          next.constant += c * temp[static_cast<std::size_t>(idx)].constant;
          next.coef += c * temp[static_cast<std::size_t>(idx)].coef;
        } else {
          next.constant += c * hist(state.t_in, 1 - idx);
        }
      } else if (ch == channel::kPower) {
        if (idx >= 0) {
          next.coef[idx] += c;
        } else {
          next.constant += c * hist(state.power, -idx);
        }
      } else {
        next.constant += c * (idx >= 0 ? fc.t_out[idx] : hist(state.t_out, -idx));
      }
    }
    temp[static_cast<std::size_t>(t + 1)] = std::move(next);
  }

  p.free_response.resize(T + 1);
  p.response.resize(T + 1, T);
  for (Eigen::Index t = 0; t <= T; ++t) {
    p.free_response[t] = temp[static_cast<std::size_t>(t)].constant;
    p.response.row(t) = temp[static_cast<std::size_t>(t)].coef;
  }

  if (fc.occupancy.size() == 0) {
    p.occupancy = occupancy_forecast(comfort, state.now, horizon, step);
  } else if (fc.occupancy.size() == T) {
    p.occupancy = Eigen::VectorXd::Zero(T + 1);
    p.occupancy.tail(T) = fc.occupancy;
  } else {
    throw DataError("occupancy forecast must cover temperatures 1..T");
  }
  p.lower.resize(T + 1);
  p.upper.resize(T + 1);
  for (Eigen::Index t = 0; t <= T; ++t) {
    const Timestamp ts = state.now + step * t;
    p.lower[t] = comfort.lower_at(ts);
    p.upper[t] = comfort.upper_at(ts);
  }
  p.ramp_weight = penalties.ramp_weights(p.grid);
  const Eigen::VectorXd t_out = fc.t_out.head(T);
  p.hvac = hvac::linearize_for_mpc(hvac_model, t_out);
  p.d_min.resize(T);
  p.d_max.resize(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    p.d_min[t] = p.hvac[static_cast<std::size_t>(t)].d_min;
    p.d_max[t] = p.hvac[static_cast<std::size_t>(t)].d_max;
  }
  return p;
}

ObjectiveTerms evaluate_terms(const MPCProblem& p, const Eigen::VectorXd& power, const Eigen::VectorXd& slack,
                              double max_ramp) {
  const Eigen::VectorXd temp = p.free_response + p.response * power;
  ObjectiveTerms terms;
  terms.energy = power.sum() * p.step_hours() / p.scales.energy_scale;
  double comfort = 0.0;
  for (Eigen::Index t = 1; t < temp.size(); ++t) {
    const double e = temp[t] - p.comfort_temp;
    comfort += p.occupancy[t] * e * e;
  }
  terms.comfort = comfort / p.scales.comfort_scale;
  terms.ramp = max_ramp / p.scales.ramp_scale;
  terms.slack = p.penalties.slack_penalty * slack.sum() / p.scales.slack_scale;
  return terms;
}

ControlCommand receding_horizon_step(const ScheduleSolution& s) {
  ControlCommand cmd;
  cmd.on = !s.on.empty() && s.on[0] != 0;
  cmd.power = cmd.on ? s.power[0] : 0.0;
  if (cmd.on && s.temperature.size() > 1) cmd.setpoint = s.temperature[1];
  return cmd;
}

std::vector<std::uint8_t> shift_pattern(const std::vector<std::uint8_t>& pattern) {
  if (pattern.empty()) return pattern;
  std::vector<std::uint8_t> out(pattern.begin() + 1, pattern.end());
  out.push_back(pattern.back());
  return out;
}

NormalizationScales default_scales(const ExperimentLog& log, const ComfortSpec& comfort,
                                   const PenaltyConfig& penalties, int horizon) {
  const auto& f = log.frame;
  const std::size_t n = f.length();
  if (n == 0 || !f.has_channel(channel::kPower)) throw DataError("baseline log is empty");
  const auto& d = f.values(channel::kPower);
  const auto& tin = f.values(channel::kRoomTemp);
  const bool has_occ = f.has_channel(channel::kOccupancy);
  double energy = 0.0, comfort_err = 0.0, ramp = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const auto i = static_cast<Eigen::Index>(t);
    energy += d[i] * f.grid().step_hours();
    const double occ = has_occ ? f.values(channel::kOccupancy)[i] : (comfort.occupied(f.grid().at(t)) ? 1.0 : 0.0);
    if (occ > 0.0 && !f.is_missing(channel::kRoomTemp, t)) {
      const double e = tin[i] - comfort.comfort_temp;
      comfort_err += e * e;
    }
    if (t > 0) ramp = std::max(ramp, penalties.gamma_at(f.grid().at(t)) * (d[i] - d[i - 1]));
  }
  const double per_horizon = static_cast<double>(horizon) / static_cast<double>(n);
  NormalizationScales s;
  s.energy_scale = energy * per_horizon;
  s.comfort_scale = std::max(comfort_err * per_horizon, 1e-3);
  s.ramp_scale = std::max(ramp, 1e-3);
  s.slack_scale = 1.0;
  if (!(s.energy_scale > 0.0)) s.energy_scale = 1e-3;
  return s;
}

double invariant_violation(const MPCProblem& p, const ScheduleSolution& s) {
  const auto T = static_cast<Eigen::Index>(p.horizon);
  double v = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const double d = s.power[t];
    if (s.on[static_cast<std::size_t>(t)]) {
      v = std::max({v, p.d_min[t] - d, d - p.d_max[t]});
    } else {
      v = std::max(v, std::abs(d));
    }
    const double prev = t == 0 ? p.previous_power : s.power[t - 1];
    v = std::max(v, p.ramp_weight[t] * (d - prev) - s.max_ramp);
  }
  for (Eigen::Index t = 1; t <= T; ++t) {
    v = std::max({v, -s.slack[t], p.lower[t] - s.slack[t] - s.temperature[t], s.temperature[t] - p.upper[t] - s.slack[t]});
  }
  return v;
}

}  // namespace hvacsr::mpc
