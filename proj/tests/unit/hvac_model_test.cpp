#include <gtest/gtest.h>

#include <cmath>

#include "hvacsr/hvac/hvac_model.hpp"
#include "support.hpp"

using namespace hvacsr;
using namespace hvacsr::hvac;

namespace {

PWLCurve curve(std::initializer_list<std::pair<double, double>> knots) {
  Eigen::VectorXd q(static_cast<Eigen::Index>(knots.size())), d(q.size());
  Eigen::Index k = 0;
  for (const auto& [a, b] : knots) {
    q[k] = a;
    d[k++] = b;
  }
  return PWLCurve(q, d);
}

HVACModel single_level() {
  return HVACModel({{0.0, curve({{0, 0}, {5, 1.0}, {10, 2.5}})}}, 10.0, 2.5, 0.11, HvacMode::Heating);
}

HVACModel two_levels() {
  return HVACModel({{0.0, curve({{1, 0.5}, {10, 3.0}})}, {10.0, curve({{1, 0.3}, {10, 2.0}})}}, 10.0, 3.0, 0.11,
                   HvacMode::Heating);
}

}  // namespace

TEST(PwlCurve, RejectsMalformedKnots) {
  EXPECT_THROW(curve({{0, 0}}), DataError);
  EXPECT_THROW(curve({{0, 0}, {0, 1}}), DataError);
  EXPECT_THROW(curve({{0, 1}, {1, 0.5}}), DataError);
  EXPECT_THROW(curve({{0, 0}, {1, 1}}).evaluate(1.5), DataError);
}

TEST(PwlCurve, InverseReturnsLowestCapacityOnFlats) {
  const auto c = curve({{0, 0}, {2, 1}, {4, 1}, {6, 2}});
  EXPECT_FALSE(c.strictly_increasing());
  EXPECT_DOUBLE_EQ(c.inverse(1.0), 2.0);
  EXPECT_DOUBLE_EQ(c.inverse(1.5), 5.0);
}

TEST(CapacityToPower, OffStateAndMidpoint) {
  const auto m = single_level();
  EXPECT_DOUBLE_EQ(capacity_to_power(m, 0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(capacity_to_power(m, 7.5, 0.0), 1.75);
  EXPECT_DOUBLE_EQ(power_to_capacity(m, 0.0, 0.0), 0.0);
}

TEST(CapacityToPower, AmbientMidpointAveragesLevels) {
  const auto m = two_levels();
  for (double q : {1.1, 4.0, 7.3, 10.0}) {
    const double mid = capacity_to_power(m, q, 5.0);
    EXPECT_NEAR(mid, 0.5 * (capacity_to_power(m, q, 0.0) + capacity_to_power(m, q, 10.0)), 1e-12);
  }
  // Outside the level range the nearest level applies.
  EXPECT_DOUBLE_EQ(capacity_to_power(m, 5.0, -20.0), capacity_to_power(m, 5.0, 0.0));
  EXPECT_DOUBLE_EQ(capacity_to_power(m, 5.0, 40.0), capacity_to_power(m, 5.0, 10.0));
}

TEST(GapRule, SyntheticUnitTurnsOffBelowMinimumLoad) {
  const auto m = synthetic_heating_model();
  EXPECT_DOUBLE_EQ(m.q_min(), 4.125);
  EXPECT_DOUBLE_EQ(m.load_min(), 0.11);
  EXPECT_THROW(capacity_to_power(m, 4.1, 0.0), InfeasibleOperatingPoint);
  EXPECT_THROW(capacity_to_power(m, 1e-6, 0.0), InfeasibleOperatingPoint);
  EXPECT_NO_THROW(capacity_to_power(m, 4.125, 0.0));
  EXPECT_THROW(capacity_to_power(m, 37.6, 0.0), InfeasibleOperatingPoint);
  const double d_lo = m.min_on_power(3.0);
  EXPECT_THROW(power_to_capacity(m, d_lo - 1e-6, 3.0), InfeasibleOperatingPoint);
  EXPECT_NEAR(power_to_capacity(m, d_lo, 3.0), 4.125, 1e-12);
}

TEST(SyntheticUnit, PartLoadIsMoreEfficient) {
  const auto m = synthetic_heating_model();
  for (double t_out : {-10.0, 0.0, 10.0, 20.0}) {
    const double cop_min = m.q_min() / m.min_on_power(t_out);
    const double cop_max = m.q_max() / m.max_on_power(t_out);
    EXPECT_GT(cop_min, cop_max) << t_out;
  }
  EXPECT_GT(m.min_on_power(-10.0), m.min_on_power(20.0));
}

TEST(Linearize, ConstantForecastGivesIdenticalSteps) {
  const auto m = synthetic_heating_model();
  const auto lin = linearize_for_mpc(m, Eigen::VectorXd::Constant(5, 2.5));
  ASSERT_EQ(lin.size(), 5u);
  for (const auto& l : lin) {
    EXPECT_EQ(l.d_min, lin[0].d_min);
    EXPECT_EQ(l.d_max, lin[0].d_max);
    ASSERT_EQ(l.segments.size(), lin[0].segments.size());
  }
}

TEST(Linearize, SingleSegmentInvertsTheCurve) {
  const auto m = synthetic_heating_model();
  const auto lin = linearize_for_mpc(m, Eigen::VectorXd::Constant(1, 0.0))[0];
  ASSERT_EQ(lin.segments.size(), 1u);
  const auto& s = lin.segments[0];
  EXPECT_NEAR(s.alpha * lin.d_min + s.beta, m.q_min(), 1e-12);
  EXPECT_NEAR(s.alpha * lin.d_max + s.beta, m.q_max(), 1e-12);
  EXPECT_NEAR(lin.capacity(0.5 * (lin.d_min + lin.d_max)),
              power_to_capacity(m, 0.5 * (lin.d_min + lin.d_max), 0.0), 1e-12);
  EXPECT_DOUBLE_EQ(lin.capacity(0.0), 0.0);
  EXPECT_THROW(lin.capacity(0.5 * lin.d_min), InfeasibleOperatingPoint);
}

TEST(Linearize, ColderAmbientNeedsMorePowerToStart) {
  const auto m = synthetic_heating_model();
  const Eigen::VectorXd t_out = Eigen::VectorXd::LinSpaced(31, 20.0, -10.0);
  const auto lin = linearize_for_mpc(m, t_out);
  for (std::size_t t = 1; t < lin.size(); ++t) EXPECT_GE(lin[t].d_min, lin[t - 1].d_min);
}

TEST(FitPwl, CollinearPointsAreExact) {
  std::vector<CapacityPowerPoint> pts;
  for (int k = 0; k < 20; ++k) pts.push_back({4.0 + k, 0.3 * (4.0 + k) + 0.1});
  const auto c = fit_pwl(pts, 2);
  EXPECT_EQ(c.segments(), 2);
  EXPECT_LT(pwl_residual(c, pts), 1e-9);
}

TEST(FitPwl, RecoversAKnee) {
  // D = max(0.2 Q, 0.5 Q - 3): knee at Q = 10.
  std::vector<CapacityPowerPoint> pts;
  for (int k = 0; k <= 40; ++k) {
    const double q = 0.5 * k;
    pts.push_back({q, std::max(0.2 * q, 0.5 * q - 3.0)});
  }
  const auto c = fit_pwl(pts, 2);
  ASSERT_EQ(c.knots(), 3);
  const double spacing = 20.0 / 2.0;  // breakpoints sit at capacity quantiles
  EXPECT_NEAR(c.capacity()[1], 10.0, spacing);
  for (const auto& p : pts) EXPECT_GE(c.evaluate(p.capacity) + 1e-9, 0.0);
}

TEST(FitPwl, DecreasingDataIsPooledFlat) {
  std::vector<CapacityPowerPoint> pts;
  for (int k = 0; k < 12; ++k) pts.push_back({1.0 + k, 5.0 - 0.2 * k});
  const auto c = fit_pwl(pts, 3);
  for (Eigen::Index k = 1; k < c.knots(); ++k) EXPECT_GE(c.power()[k], c.power()[k - 1]);
}

TEST(FitPwl, InputValidation) {
  std::vector<CapacityPowerPoint> two{{1, 1}, {2, 2}};
  EXPECT_THROW(fit_pwl(two, 2), DataError);
  std::vector<CapacityPowerPoint> dup{{1, 1}, {1, 2}, {3, 3}};
  EXPECT_THROW(fit_pwl(dup, 1), DataError);
  EXPECT_THROW(fit_pwl(two, 0), DataError);
}

TEST(HvacModel, ConstructionChecks) {
  EXPECT_THROW(HVACModel({}, 10, 3, 0.11, HvacMode::Heating), DataError);
  EXPECT_THROW(HVACModel({{0.0, curve({{2, 0.5}, {10, 3.0}})}}, 10, 3, 0.11, HvacMode::Heating), DataError);
  EXPECT_THROW(HVACModel({{0.0, curve({{1, 0.5}, {10, 3.0}})}}, 10, 3, 1.5, HvacMode::Heating), DataError);
  EXPECT_EQ(parse_mode("cooling"), HvacMode::Cooling);
  EXPECT_THROW(parse_mode("fan"), ConfigError);
}
