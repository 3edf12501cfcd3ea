#pragma once

#include <Eigen/Dense>

#include "hvacsr/core/time.hpp"

namespace hvacsr::plant {

/// 2R2C network: air node (C_i) tied to ambient through R_ia and to the mass node (C_m) through R_im.
struct RCParameters {
  double r_ia = 3.0;  // K/kW
  double r_im = 1.0;  // K/kW
  double c_i = 3.0;   // kWh/K
  double c_m = 15.0;  // kWh/K

  void validate() const;
};

struct RCState {
  double t_i = 20.0;
  double t_m = 20.0;
};

struct RCInputs {
  double t_out = 0.0;
  double q_hvac = 0.0;  // kW of sensible heat into the air node (negative when cooling)
  double gains = 0.0;   // kW
};

/// Exact zero-order-hold discretization at a fixed step: x' = A x + B [T_out, Q, gains].
class RCModel {
 public:
  RCModel(RCParameters params, Seconds step);

  const RCParameters& parameters() const { return params_; }
  Seconds step() const { return step_; }
  const Eigen::Matrix2d& a() const { return a_; }
  const Eigen::Matrix<double, 2, 3>& b() const { return b_; }
  double spectral_radius() const;

  RCState advance(const RCState& x, const RCInputs& u) const;
  /// Heat that brings the air node to `target` at the end of the step.
  double capacity_for(const RCState& x, double t_out, double gains, double target) const;
  /// Fixed point for constant inputs.
  RCState steady_state(const RCInputs& u) const;

 private:
  RCParameters params_;
  Seconds step_;
  Eigen::Matrix2d a_;
  Eigen::Matrix<double, 2, 3> b_;
};

RCState step_rc(const RCParameters& params, const RCState& x, const RCInputs& u, Seconds dt);

}  // namespace hvacsr::plant
