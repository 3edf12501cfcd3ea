#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "hvacsr/core/comfort.hpp"
#include "hvacsr/core/experiment_log.hpp"
#include "hvacsr/core/time.hpp"
#include "hvacsr/hvac/hvac_model.hpp"
#include "hvacsr/sr/affine_model.hpp"

namespace hvacsr::mpc {

/// Slack penalty and ramp weights: gamma_peak inside the peak window, 1 elsewhere.
struct PenaltyConfig {
  double slack_penalty = 100.0;
  double gamma_peak = 5.0;
  DailyWindow peak_window = DailyWindow::hours(5, 10);
  Seconds utc_offset{0};

  void validate() const;
  double gamma_at(Timestamp ts) const { return peak_window.contains(ts, utc_offset) ? gamma_peak : 1.0; }
  Eigen::VectorXd ramp_weights(const TimeGrid& grid) const;
};

struct NormalizationScales {
  double energy_scale = 1.0;   // kWh
  double comfort_scale = 1.0;  // degC^2 * steps
  double ramp_scale = 1.0;     // kW
  double slack_scale = 1.0;    // degC * steps

  void validate() const;
  NormalizationScales scaled(double factor) const {
    return {energy_scale * factor, comfort_scale * factor, ramp_scale * factor, slack_scale * factor};
  }
};

/// Measured history at decision time. Each vector runs oldest -> newest.
struct MPCState {
  Timestamp now{};
  std::vector<double> t_in;   // back() is the current room temperature
  std::vector<double> power;  // back() is the power applied over the previous step
  std::vector<double> t_out;  // back() is the ambient temperature of the previous step
};

struct Forecasts {
  Eigen::VectorXd t_out;      // steps 0..T-1
  Eigen::VectorXd occupancy;  // temperatures 1..T
};

/// Condensed problem: T_t = free_response[t] + response.row(t) * D, t = 0..T.
struct MPCProblem {
  TimeGrid grid{Timestamp{}, Seconds{900}, 1};  // decision steps 0..T-1
  int horizon = 1;
  double comfort_temp = 20.0;
  double previous_power = 0.0;
  Eigen::VectorXd free_response;  // T+1
  Eigen::MatrixXd response;       // (T+1) x T, row 0 zero
  Eigen::VectorXd occupancy;      // T+1, entry 0 unused
  Eigen::VectorXd lower;          // T+1, entry 0 unused
  Eigen::VectorXd upper;          // T+1, entry 0 unused
  Eigen::VectorXd ramp_weight;    // T, weight of D_t - D_{t-1}
  Eigen::VectorXd d_min;          // T
  Eigen::VectorXd d_max;          // T
  std::vector<hvac::StepLinearization> hvac;
  PenaltyConfig penalties;
  NormalizationScales scales;

  double step_hours() const { return grid.step_hours(); }
  void validate() const;
};

MPCProblem build_problem(const MPCState& state, const Forecasts& forecasts, const sr::AffineModel& thermal,
                         const hvac::HVACModel& hvac, const ComfortSpec& comfort, const PenaltyConfig& penalties,
                         const NormalizationScales& scales, int horizon, Seconds step = kDefaultStep);

/// Occupancy of temperatures 0..T from the comfort window (entry 0 is zero).
Eigen::VectorXd occupancy_forecast(const ComfortSpec& comfort, Timestamp now, int horizon, Seconds step);

struct SolverStats {
  int nodes = 0;
  int qp_iterations = 0;
  double wall_ms = 0.0;
  bool node_limit_hit = false;
};

struct ScheduleSolution {
  Eigen::VectorXd power;        // D_t, t = 0..T-1
  std::vector<std::uint8_t> on;  // u_t
  Eigen::VectorXd slack;        // s_t, t = 0..T (entry 0 unused, zero)
  Eigen::VectorXd temperature;  // predicted T_t, t = 0..T
  Eigen::VectorXd capacity;     // Q_t from the HVAC linearization
  double max_ramp = 0.0;        // Delta D_max
  double objective = 0.0;
  ObjectiveTerms terms;
  SolverStats stats;
};

/// Step-wise on/off state used while branching.
enum class StepState : std::uint8_t { Off, On, Free };

struct QpSolveResult {
  ScheduleSolution solution;
  bool feasible = false;
  std::string certificate;
  int iterations = 0;
};

/// Convex subproblem for a fixed pattern (1 = on, 0 = off).
QpSolveResult solve_qp(const MPCProblem& problem, const std::vector<std::uint8_t>& fixed_onoff);
/// Same, with steps left Free relaxed to D in [0, d_max].
QpSolveResult solve_relaxation(const MPCProblem& problem, const std::vector<StepState>& states);

struct BranchAndBoundSettings {
  double mip_gap = 1e-4;
  double absolute_gap = 1e-9;
  int node_limit = 10000;
  double gap_tolerance = 1e-6;  // relaxed D within this of 0 or d_min counts as outside the gap
};

ScheduleSolution branch_and_bound(const MPCProblem& problem, const BranchAndBoundSettings& settings = {},
                                  const std::vector<std::uint8_t>* warm_start = nullptr);

/// Previous pattern advanced by one step, repeating the last entry.
std::vector<std::uint8_t> shift_pattern(const std::vector<std::uint8_t>& pattern);

struct ControlCommand {
  double power = 0.0;
  bool on = false;
  std::optional<double> setpoint;  // suppressed when off
};

ControlCommand receding_horizon_step(const ScheduleSolution& solution);

/// Normalized objective terms of an arbitrary trajectory (used for self-normalization checks).
ObjectiveTerms evaluate_terms(const MPCProblem& problem, const Eigen::VectorXd& power, const Eigen::VectorXd& slack,
                              double max_ramp);

/// Scales from a rule-based baseline run; totals are normalized to `horizon` steps.
NormalizationScales default_scales(const ExperimentLog& baseline, const ComfortSpec& comfort,
                                   const PenaltyConfig& penalties, int horizon);

/// Max violation of the schedule invariants (u/D coupling, slack, ramp epigraph, comfort band).
double invariant_violation(const MPCProblem& problem, const ScheduleSolution& solution);

}  // namespace hvacsr::mpc
