#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hvacsr/core/error.hpp"
#include "hvacsr/hvac/pwl_curve.hpp"

namespace hvacsr::hvac {

enum class HvacMode { Heating, Cooling };

std::string to_string(HvacMode mode);
HvacMode parse_mode(std::string_view text);

struct AmbientLevel {
  double t_out_c = 0.0;
  PWLCurve curve;
};

/// Raised for capacities or powers inside the off/on gap (0, q_min) or beyond rating.
class InfeasibleOperatingPoint : public DataError {
 public:
  using DataError::DataError;
};

/// Capacity <-> power curves indexed by ambient temperature, with the minimum-load turn-off rule.
class HVACModel {
 public:
  HVACModel(std::vector<AmbientLevel> levels, double rated_capacity_kw, double rated_power_kw, double load_min,
            HvacMode mode);

  const std::vector<AmbientLevel>& levels() const { return levels_; }
  double q_min() const { return q_min_; }
  double q_max() const { return q_max_; }
  double rated_power() const { return rated_power_; }
  double load_min() const { return load_min_; }
  HvacMode mode() const { return mode_; }

  /// Power-vs-capacity curve at an ambient temperature: linear blend of the two bracketing
  /// levels over the union of their knots, clamped outside the level range.
  PWLCurve curve_at(double t_out) const;

  double min_on_power(double t_out) const;
  double max_on_power(double t_out) const;

 private:
  std::pair<std::size_t, double> bracket(double t_out) const;

  std::vector<AmbientLevel> levels_;
  double q_min_;
  double q_max_;
  double rated_power_;
  double load_min_;
  HvacMode mode_;

  friend double capacity_to_power(const HVACModel&, double, double);
};

/// 0 for q = 0; throws InfeasibleOperatingPoint for q in (0, q_min) or above q_max.
double capacity_to_power(const HVACModel& model, double q, double t_out);

/// Inverse of capacity_to_power; flat segments return their lowest capacity.
double power_to_capacity(const HVACModel& model, double d, double t_out);

/// q = alpha * d + beta on [d_lo, d_hi].
struct CapacitySegment {
  double d_lo = 0.0;
  double d_hi = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Operating range at one step; the off point (0, 0) is implicit.
struct StepLinearization {
  double d_min = 0.0;
  double d_max = 0.0;
  std::vector<CapacitySegment> segments;

  double capacity(double d) const;
};

std::vector<StepLinearization> linearize_for_mpc(const HVACModel& model, const Eigen::VectorXd& t_out_forecast);

struct CapacityPowerPoint {
  double capacity = 0.0;
  double power = 0.0;
};

/// Continuous least-squares fit with breakpoints at capacity quantiles. Negative slopes are
/// pooled into flat segments. Returns the lowest-residual fit over 1..n_segments quantile
/// breakpoint sets, expressed on n_segments pieces.
PWLCurve fit_pwl(std::span<const CapacityPowerPoint> points, int n_segments);

double pwl_residual(const PWLCurve& curve, std::span<const CapacityPowerPoint> points);

/// Synthetic heating unit: levels -10/0/10/20 C, 37.5 kW rated capacity, load_min 0.11.
HVACModel synthetic_heating_model();

}  // namespace hvacsr::hvac
