#include "hvacsr/plant/rc_model.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "hvacsr/core/error.hpp"

namespace hvacsr::plant {

void RCParameters::validate() const {
  for (double v : {r_ia, r_im, c_i, c_m}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("RC resistances and capacitances must be positive");
  }
}

namespace {

// Continuous-time system in hours.
void continuous(const RCParameters& p, Eigen::Matrix2d& a, Eigen::Matrix<double, 2, 3>& b) {
  a << -(1.0 / p.r_ia + 1.0 / p.r_im) / p.c_i, 1.0 / (p.r_im * p.c_i), 1.0 / (p.r_im * p.c_m),
      -1.0 / (p.r_im * p.c_m);
  b << 1.0 / (p.r_ia * p.c_i), 1.0 / p.c_i, 1.0 / p.c_i, 0.0, 0.0, 0.0;
}

void discretize(const RCParameters& p, Seconds dt, Eigen::Matrix2d& ad, Eigen::Matrix<double, 2, 3>& bd) {
  if (dt.count() <= 0) throw ConfigError("RC step must be positive");
  Eigen::Matrix2d a;
  Eigen::Matrix<double, 2, 3> b;
  continuous(p, a, b);
  Eigen::Matrix<double, 5, 5> m = Eigen::Matrix<double, 5, 5>::Zero();
  m.topLeftCorner<2, 2>() = a;
  m.topRightCorner<2, 3>() = b;
  const double h = static_cast<double>(dt.count()) / 3600.0;
  const Eigen::Matrix<double, 5, 5> e = (m * h).exp();
  ad = e.topLeftCorner<2, 2>();
  bd = e.topRightCorner<2, 3>();
}

}  // namespace

RCModel::RCModel(RCParameters params, Seconds step) : params_(params), step_(step) {
  params_.validate();
  discretize(params_, step_, a_, b_);
  if (!(spectral_radius() < 1.0)) throw ConfigError("RC discretization is not stable");
}

double RCModel::spectral_radius() const { return a_.eigenvalues().cwiseAbs().maxCoeff(); }

RCState RCModel::advance(const RCState& x, const RCInputs& u) const {
  const Eigen::Vector2d next = a_ * Eigen::Vector2d(x.t_i, x.t_m) + b_ * Eigen::Vector3d(u.t_out, u.q_hvac, u.gains);
  return {next[0], next[1]};
}

double RCModel::capacity_for(const RCState& x, double t_out, double gains, double target) const {
  const double free = advance(x, {t_out, 0.0, gains}).t_i;
  return (target - free) / b_(0, 1);
}

RCState RCModel::steady_state(const RCInputs& u) const {
  const Eigen::Vector2d x = (Eigen::Matrix2d::Identity() - a_).lu().solve(b_ * Eigen::Vector3d(u.t_out, u.q_hvac, u.gains));
  return {x[0], x[1]};
}

RCState step_rc(const RCParameters& params, const RCState& x, const RCInputs& u, Seconds dt) {
  params.validate();
  Eigen::Matrix2d a;
  Eigen::Matrix<double, 2, 3> b;
  discretize(params, dt, a, b);
  const Eigen::Vector2d next = a * Eigen::Vector2d(x.t_i, x.t_m) + b * Eigen::Vector3d(u.t_out, u.q_hvac, u.gains);
  return {next[0], next[1]};
}

}  // namespace hvacsr::plant
