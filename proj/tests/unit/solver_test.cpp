#include <gtest/gtest.h>

#include "hvacsr/core/error.hpp"
#include "hvacsr/mpc/interior_point_qp.hpp"
#include "hvacsr/mpc/problem.hpp"
#include "support.hpp"

using namespace hvacsr;
using namespace hvacsr::mpc;
using testing_support::monday;

namespace {

sr::AffineModel drift_model(double drift, double gain) {
  sr::AffineModel m;
  m.intercept = drift;
  m.terms = {{{"T_in", 0}, 1.0}};
  if (gain != 0.0) m.terms.push_back({{"D", 0}, gain});
  return m;
}

ComfortSpec never_occupied(double setback_lower) {
  ComfortSpec c;
  c.occupied_window = DailyWindow::hours(0, 0);
  c.setback_lower = setback_lower;
  return c;
}

MPCProblem problem(const sr::AffineModel& model, const ComfortSpec& comfort, double t0, int horizon,
                   NormalizationScales sc = {}) {
  MPCState s;
  s.now = monday();
  s.t_in = {t0};
  Forecasts f;
  f.t_out = Eigen::VectorXd::Constant(horizon, 0.0);
  return build_problem(s, f, model, hvac::synthetic_heating_model(), comfort, PenaltyConfig{}, sc, horizon);
}

}  // namespace

TEST(SolveQp, DecoupledNoDemandStaysOff) {
  const auto p = problem(drift_model(0.0, 0.0), never_occupied(5.0), 20.0, 4);
  const auto r = branch_and_bound(p);
  EXPECT_TRUE(r.power.isZero());
  EXPECT_LT(r.slack.cwiseAbs().maxCoeff(), 1e-8) << r.slack.transpose();
  EXPECT_NEAR(r.objective, 0.0, 1e-8);
  EXPECT_NEAR(r.max_ramp, 0.0, 1e-8);
}

TEST(SolveQp, AllOffInsideBoundsHasOnlyTheComfortConstant) {
  ComfortSpec comfort;
  comfort.occupied_window = DailyWindow::hours(0, 24);
  const auto p = problem(drift_model(-0.1, 0.5), comfort, 20.0, 3);
  const auto r = solve_qp(p, {0, 0, 0});
  ASSERT_TRUE(r.feasible);
  EXPECT_TRUE(r.solution.power.isZero());
  EXPECT_NEAR(r.solution.slack.sum(), 0.0, 1e-8);
  const double comfort_sum = 0.01 + 0.04 + 0.09;
  EXPECT_NEAR(r.solution.objective, comfort_sum / p.scales.comfort_scale, 1e-7);
}

TEST(SolveQp, AllOffBelowSetbackPaysExactlyTheViolation) {
  NormalizationScales sc{1.0, 1.0, 1.0, 2.0};
  const auto p = problem(drift_model(-0.5, 0.5), never_occupied(15.0), 15.2, 3, sc);
  const auto r = solve_qp(p, {0, 0, 0});
  ASSERT_TRUE(r.feasible);
  // Uncontrolled trajectory 14.7, 14.2, 13.7 against the 15.0 floor.
  EXPECT_NEAR(r.solution.slack[1], 0.3, 1e-7);
  EXPECT_NEAR(r.solution.slack[2], 0.8, 1e-7);
  EXPECT_NEAR(r.solution.slack[3], 1.3, 1e-7);
  EXPECT_NEAR(r.solution.objective, 100.0 * 2.4 / 2.0, 1e-5);
}

TEST(SolveQp, OnStepsRespectTheMinimumPower) {
  const auto p = problem(drift_model(0.0, 0.1), never_occupied(5.0), 20.0, 3);
  const auto r = solve_qp(p, {1, 0, 1});
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR(r.solution.power[0], p.d_min[0], 1e-7);
  EXPECT_DOUBLE_EQ(r.solution.power[1], 0.0);
  EXPECT_EQ(r.solution.on, (std::vector<std::uint8_t>{1, 0, 1}));
  EXPECT_NEAR(r.solution.capacity[0], 4.125, 1e-6);
  EXPECT_LT(invariant_violation(p, r.solution), 1e-6);
}

TEST(SolveQp, PatternLengthMustMatch) {
  const auto p = problem(drift_model(0.0, 0.1), never_occupied(5.0), 20.0, 3);
  EXPECT_THROW(solve_qp(p, {1, 0}), SolverError);
}

TEST(BranchAndBound, RelaxationOutsideTheGapNeedsNoBranching) {
  // Strong demand: every relaxed power sits well above d_min.
  ComfortSpec comfort;
  comfort.occupied_window = DailyWindow::hours(0, 24);
  const auto p = problem(drift_model(-1.0, 0.2), comfort, 19.0, 4);
  const auto r = branch_and_bound(p);
  EXPECT_EQ(r.stats.nodes, 1);
  for (int t = 0; t < 4; ++t) EXPECT_GE(r.power[t], p.d_min[t] - 1e-9);
  EXPECT_LT(invariant_violation(p, r), 1e-6);
}

TEST(BranchAndBound, NodeLimitIsReported) {
  testing_support::Gen g(99);
  for (int attempt = 0; attempt < 200; ++attempt) {
    const auto p = testing_support::random_problem(g, 6);
    const auto full = branch_and_bound(p);
    if (full.stats.nodes < 4) continue;
    BranchAndBoundSettings s;
    s.node_limit = 2;
    const auto cut = branch_and_bound(p, s);
    EXPECT_TRUE(cut.stats.node_limit_hit);
    EXPECT_GE(cut.objective, full.objective - 1e-9);
    EXPECT_FALSE(full.stats.node_limit_hit);
    return;
  }
  GTEST_SKIP() << "no instance needed more than three nodes";
}

TEST(BranchAndBound, WarmStartDoesNotChangeTheOptimum) {
  testing_support::Gen g(5);
  for (int c = 0; c < 20; ++c) {
    const auto p = testing_support::random_problem(g, 5);
    BranchAndBoundSettings exact;
    exact.mip_gap = 0.0;
    const auto cold = branch_and_bound(p, exact);
    std::vector<std::uint8_t> guess(5, 1);
    const auto warm = branch_and_bound(p, exact, &guess);
    EXPECT_NEAR(cold.objective, warm.objective, 1e-6 * (1.0 + std::abs(cold.objective)));
  }
}

TEST(InteriorPoint, DetectsCrossedBounds) {
  QuadraticProgram<double> qp;
  qp.hessian = Eigen::MatrixXd::Identity(1, 1);
  qp.gradient = Eigen::VectorXd::Zero(1);
  qp.rows.resize(0, 1);
  qp.rhs = Eigen::VectorXd::Zero(0);
  qp.lower = Eigen::VectorXd::Constant(1, 2.0);
  qp.upper = Eigen::VectorXd::Constant(1, 1.0);
  const auto r = solve_interior_point(qp);
  EXPECT_EQ(r.status, QpStatus::Infeasible);
  EXPECT_NE(r.certificate.find("index 0"), std::string::npos);
}

TEST(InteriorPoint, BoxConstrainedQuadratic) {
  // min (x-3)^2 + (y+1)^2 on [0,2] x [0,2] -> (2, 0).
  QuadraticProgram<double> qp;
  qp.hessian = 2.0 * Eigen::MatrixXd::Identity(2, 2);
  qp.gradient = (Eigen::VectorXd(2) << -6.0, 2.0).finished();
  qp.constant = 10.0;
  qp.rows.resize(0, 2);
  qp.rhs = Eigen::VectorXd::Zero(0);
  qp.lower = Eigen::VectorXd::Zero(2);
  qp.upper = Eigen::VectorXd::Constant(2, 2.0);
  const auto r = solve_interior_point(qp);
  ASSERT_EQ(r.status, QpStatus::Optimal);
  EXPECT_NEAR(r.x[0], 2.0, 1e-8);
  EXPECT_NEAR(r.x[1], 0.0, 1e-8);
  EXPECT_NEAR(r.objective, 1.0 + 1.0, 1e-8);
}
