#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "hvacsr/mpc/problem.hpp"

namespace testing_support {

using hvacsr::mpc::MPCProblem;
using hvacsr::mpc::solve_qp;

// Best objective over every on/off pattern, each solved as a fixed-pattern QP.
inline double enumerate(const MPCProblem& p, std::vector<std::uint8_t>* best_pattern) {
  const int T = p.horizon;
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << T); ++mask) {
    std::vector<std::uint8_t> pattern(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) pattern[static_cast<std::size_t>(t)] = (mask >> t) & 1u;
    const auto r = solve_qp(p, pattern);
    if (r.feasible && r.solution.objective < best) {
      best = r.solution.objective;
      if (best_pattern) *best_pattern = pattern;
    }
  }
  return best;
}

// Independent solver for a fixed pattern: augmented Lagrangian on the slack/ramp
// constraints with an accelerated projected-gradient inner loop over the boxes
// D in [d_min, d_max] (on steps), s >= 0, r >= 0. Variables: [D (all steps), s_1..s_T, r].
struct PgOracle {
  const MPCProblem& p;
  std::vector<std::uint8_t> on;
  int T;
  Eigen::VectorXd lo, hi;
  Eigen::MatrixXd g_rows;  // constraint rows g(z) = G z - h <= 0
  Eigen::VectorXd g_rhs;
  Eigen::MatrixXd hess;    // objective 1/2 z'Hz + c'z
  Eigen::VectorXd lin;

  PgOracle(const MPCProblem& prob, std::vector<std::uint8_t> pattern) : p(prob), on(std::move(pattern)), T(prob.horizon) {
    const int n = 2 * T + 1;
    lo = Eigen::VectorXd::Zero(n);
    hi = Eigen::VectorXd::Constant(n, 1e6);
    for (int t = 0; t < T; ++t) {
      lo[t] = on[t] ? p.d_min[t] : 0.0;
      hi[t] = on[t] ? p.d_max[t] : 0.0;
    }
    hess = Eigen::MatrixXd::Zero(n, n);
    lin = Eigen::VectorXd::Zero(n);
    for (int t = 0; t < T; ++t) lin[t] = p.step_hours() / p.scales.energy_scale;
    for (int k = 1; k <= T; ++k) {
      const double w = 2.0 * p.occupancy[k] / p.scales.comfort_scale;
      const Eigen::RowVectorXd row = p.response.row(k);
      hess.topLeftCorner(T, T) += w * row.transpose() * row;
      lin.head(T) += w * (p.free_response[k] - p.comfort_temp) * row.transpose();
      lin[T + k - 1] = p.penalties.slack_penalty / p.scales.slack_scale;
    }
    lin[2 * T] = 1.0 / p.scales.ramp_scale;

    g_rows = Eigen::MatrixXd::Zero(3 * T, n);
    g_rhs = Eigen::VectorXd::Zero(3 * T);
    for (int k = 1; k <= T; ++k) {
      // lower - T_k - s_k <= 0 and T_k - upper - s_k <= 0
      g_rows.row(2 * (k - 1)).head(T) = -p.response.row(k);
      g_rows(2 * (k - 1), T + k - 1) = -1.0;
      g_rhs[2 * (k - 1)] = p.free_response[k] - p.lower[k];
      g_rows.row(2 * k - 1).head(T) = p.response.row(k);
      g_rows(2 * k - 1, T + k - 1) = -1.0;
      g_rhs[2 * k - 1] = p.upper[k] - p.free_response[k];
    }
    for (int t = 0; t < T; ++t) {
      // gamma_t (D_t - D_{t-1}) - r <= 0, D_{-1} = previous power
      const int r = 2 * T + t;
      g_rows(r, t) = p.ramp_weight[t];
      if (t > 0) {
        g_rows(r, t - 1) = -p.ramp_weight[t];
      } else {
        g_rhs[r] = p.ramp_weight[t] * p.previous_power;
      }
      g_rows(r, 2 * T) = -1.0;
    }
  }

  double objective(const Eigen::VectorXd& z) const {
    double comfort = 0.0;
    const Eigen::VectorXd temp = p.free_response + p.response * z.head(T);
    for (int k = 1; k <= T; ++k) comfort += p.occupancy[k] * std::pow(temp[k] - p.comfort_temp, 2);
    return p.step_hours() * z.head(T).sum() / p.scales.energy_scale + comfort / p.scales.comfort_scale +
           z[2 * T] / p.scales.ramp_scale + p.penalties.slack_penalty * z.segment(T, T).sum() / p.scales.slack_scale;
  }

  Eigen::VectorXd project(Eigen::VectorXd z) const { return z.cwiseMax(lo).cwiseMin(hi); }

  Eigen::VectorXd solve() const {
    const int n = 2 * T + 1;
    Eigen::VectorXd z = project(Eigen::VectorXd::Zero(n));
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(g_rows.rows());
    // A fixed, moderate penalty keeps the inner problem well conditioned; the multiplier
    // updates carry the constraint accuracy.
    const double rho = 20.0;
    const double lip = hess.operatorNorm() + rho * g_rows.squaredNorm() + 1e-12;
    for (int outer = 0; outer < 3000; ++outer) {
      auto grad = [&](const Eigen::VectorXd& v) {
        const Eigen::VectorXd mult = (lambda + rho * (g_rows * v - g_rhs)).cwiseMax(0.0);
        return Eigen::VectorXd(hess * v + lin + g_rows.transpose() * mult);
      };
      Eigen::VectorXd y = z, prev = z;
      double tk = 1.0;
      for (int it = 0; it < 200000; ++it) {
        const Eigen::VectorXd next = project(y - grad(y) / lip);
        if ((y - next).dot(next - prev) > 0.0) {  // gradient restart
          tk = 1.0;
          y = next;
        } else {
          const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
          y = next + ((tk - 1.0) / tn) * (next - prev);
          tk = tn;
        }
        prev = next;
        if ((project(next - grad(next) / lip) - next).lpNorm<Eigen::Infinity>() < 1e-15) break;
      }
      z = prev;
      const Eigen::VectorXd updated = (lambda + rho * (g_rows * z - g_rhs)).cwiseMax(0.0);
      const double change = (updated - lambda).lpNorm<Eigen::Infinity>();
      lambda = updated;
      if (change < 1e-11) break;
    }
    return z;
  }
};

}  // namespace testing_support
