#include <gtest/gtest.h>

#include "hvacsr/core/error.hpp"
#include "hvacsr/plant/rc_model.hpp"

using namespace hvacsr;
using namespace hvacsr::plant;

TEST(RcModel, RejectsNonPositiveParameters) {
  RCParameters p;
  p.c_m = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.r_ia = -1.0;
  EXPECT_THROW(RCModel(p, kDefaultStep), ConfigError);
}

TEST(RcModel, EquilibriumWithAmbientStaysPut) {
  const RCModel m({}, kDefaultStep);
  RCState x{7.0, 7.0};
  for (int k = 0; k < 50; ++k) x = m.advance(x, {7.0, 0.0, 0.0});
  EXPECT_NEAR(x.t_i, 7.0, 1e-12);
  EXPECT_NEAR(x.t_m, 7.0, 1e-12);
}

TEST(RcModel, StableAndPositiveInputGains) {
  const RCModel m({}, kDefaultStep);
  EXPECT_LT(m.spectral_radius(), 1.0);
  EXPECT_GT(m.b()(0, 1), 0.0);
  EXPECT_GT(m.b()(0, 0), 0.0);
}

TEST(RcModel, SteadyStateIsFixedPoint) {
  const RCModel m({}, kDefaultStep);
  const RCInputs u{-3.0, 4.0, 0.5};
  const auto ss = m.steady_state(u);
  const auto next = m.advance(ss, u);
  EXPECT_NEAR(next.t_i, ss.t_i, 1e-10);
  EXPECT_NEAR(next.t_m, ss.t_m, 1e-10);
  // Both nodes settle at T_out + (Q + gains) * R_ia.
  EXPECT_NEAR(ss.t_i, -3.0 + 4.5 * 3.0, 1e-9);
  EXPECT_NEAR(ss.t_m, ss.t_i, 1e-9);
}

TEST(RcModel, DoubleStepEqualsTwoSteps) {
  const RCParameters p;
  const RCState x0{18.0, 16.0};
  const RCInputs u{2.0, 3.0, 0.4};
  const auto once = step_rc(p, x0, u, Seconds{1800});
  const auto twice = step_rc(p, step_rc(p, x0, u, Seconds{900}), u, Seconds{900});
  EXPECT_NEAR(once.t_i, twice.t_i, 1e-12);
  EXPECT_NEAR(once.t_m, twice.t_m, 1e-12);
}

TEST(RcModel, CapacityForHitsTarget) {
  const RCModel m({}, kDefaultStep);
  const RCState x{17.0, 16.5};
  const double q = m.capacity_for(x, 0.0, 0.4, 20.0);
  EXPECT_GT(q, 0.0);
  EXPECT_NEAR(m.advance(x, {0.0, q, 0.4}).t_i, 20.0, 1e-10);
}
