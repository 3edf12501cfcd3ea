#include <gtest/gtest.h>

#include <cmath>

#include "hvacsr/hvac/hvac_model.hpp"
#include "support.hpp"

using namespace hvacsr;
using namespace hvacsr::hvac;
using testing_support::Gen;
using testing_support::kCases;

namespace {

// Random unit with a few ambient levels: one increasing base curve, scaled up at colder levels.
HVACModel random_unit(Gen& g) {
  const double rated_q = g.uniform(5.0, 40.0);
  const double rated_d = rated_q / g.uniform(2.0, 4.5);
  const double load_min = g.uniform(0.05, 0.3);
  const int knots = g.integer(2, 5);
  const Eigen::VectorXd q = Eigen::VectorXd::LinSpaced(knots, load_min * rated_q, rated_q);
  Eigen::VectorXd base(knots);
  base[0] = g.uniform(0.05, 0.2) * rated_d;
  for (int k = 1; k < knots; ++k) base[k] = base[k - 1] + g.uniform(0.05, 0.5) * rated_d / knots;
  std::vector<AmbientLevel> levels;
  const int n_levels = g.integer(1, 4);
  double t = g.uniform(-15.0, 0.0);
  for (int l = 0; l < n_levels; ++l) {
    const double cold = 1.0 + 0.4 * (n_levels - 1 - l);
    levels.push_back({t, PWLCurve(q, base * cold)});
    t += g.uniform(3.0, 12.0);
  }
  return HVACModel(levels, rated_q, rated_d, load_min, HvacMode::Heating);
}

}  // namespace

TEST(HvacProperties, SyntheticGapIsTheMinimumLoad) {
  const auto m = synthetic_heating_model();
  EXPECT_NEAR(m.q_min(), 4.125, 1e-12);
  EXPECT_NEAR(m.load_min(), 0.11, 1e-12);
  for (int c = 0; c < kCases; ++c) {
    Gen g(testing_support::case_seed(301, c));
    const double t = g.uniform(-15.0, 25.0);
    EXPECT_THROW(capacity_to_power(m, g.uniform(1e-9, m.q_min() * (1.0 - 1e-12)), t), InfeasibleOperatingPoint);
    EXPECT_THROW(capacity_to_power(m, m.q_max() * (1.0 + g.uniform(1e-9, 1.0)), t), InfeasibleOperatingPoint);
    const double q = g.uniform(m.q_min(), m.q_max());
    EXPECT_GE(capacity_to_power(m, q, t), m.min_on_power(t) - 1e-12);
    EXPECT_EQ(capacity_to_power(m, 0.0, t), 0.0);
  }
}

TEST(HvacProperties, GapHoldsForRandomUnits) {
  for (int c = 0; c < kCases; ++c) {
    Gen g(testing_support::case_seed(302, c));
    const auto m = random_unit(g);
    const double t = g.uniform(-20.0, 30.0);
    EXPECT_THROW(capacity_to_power(m, g.uniform(1e-9, m.q_min() * 0.999), t), InfeasibleOperatingPoint);
    EXPECT_GT(m.min_on_power(t), 0.0);
    EXPECT_LE(m.min_on_power(t), m.max_on_power(t));
  }
}

TEST(HvacProperties, ThousandPointRoundTrip) {
  for (int c = 0; c < 100; ++c) {
    Gen g(testing_support::case_seed(303, c));
    const auto m = c % 2 ? random_unit(g) : synthetic_heating_model();
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double t = g.uniform(-20.0, 30.0);
      const double q = g.uniform(m.q_min(), m.q_max());
      worst = std::max(worst, std::abs(power_to_capacity(m, capacity_to_power(m, q, t), t) - q));
    }
    EXPECT_LE(worst, 1e-9) << c;
  }
}

TEST(HvacProperties, KnotsAreExact) {
  for (int c = 0; c < kCases; ++c) {
    Gen g(testing_support::case_seed(304, c));
    const auto m = random_unit(g);
    for (const auto& level : m.levels()) {
      const auto curve = m.curve_at(level.t_out_c);
      for (Eigen::Index k = 0; k < level.curve.knots(); ++k) {
        EXPECT_EQ(curve.evaluate(level.curve.capacity()[k]), level.curve.power()[k]) << c;
        EXPECT_EQ(level.curve.evaluate(level.curve.capacity()[k]), level.curve.power()[k]) << c;
      }
    }
  }
}

TEST(HvacProperties, ColderAmbientNeverNeedsLessPower) {
  for (int c = 0; c < kCases; ++c) {
    Gen g(testing_support::case_seed(305, c));
    const auto m = c % 2 ? random_unit(g) : synthetic_heating_model();
    const double t1 = g.uniform(-20.0, 30.0), t2 = g.uniform(-20.0, 30.0);
    const double q = g.uniform(m.q_min(), m.q_max());
    const double cold = std::min(t1, t2), warm = std::max(t1, t2);
    EXPECT_GE(capacity_to_power(m, q, cold), capacity_to_power(m, q, warm) - 1e-12) << c;
  }
}

TEST(HvacProperties, MoreSegmentsNeverFitWorse) {
  for (int c = 0; c < kCases; ++c) {
    Gen g(testing_support::case_seed(306, c));
    std::vector<CapacityPowerPoint> pts;
    const int n = g.integer(12, 60);
    const double knee = g.uniform(5.0, 15.0);
    for (int k = 0; k < n; ++k) {
      const double q = g.uniform(1.0, 20.0);
      const double d = 0.2 * q + (q > knee ? 0.3 * (q - knee) : 0.0) + g.normal(0.0, 0.05);
      pts.push_back({q, d});
    }
    double previous = std::numeric_limits<double>::infinity();
    for (int s = 1; s <= 4; ++s) {
      const auto curve = fit_pwl(pts, s);
      EXPECT_EQ(curve.segments(), s);
      const double r = pwl_residual(curve, pts);
      EXPECT_LE(r, previous + 1e-12) << c << " segments " << s;
      previous = r;
    }
  }
}

TEST(HvacProperties, LinearizationMatchesTheCurve) {
  for (int c = 0; c < kCases; ++c) {
    Gen g(testing_support::case_seed(307, c));
    const auto m = synthetic_heating_model();
    const Eigen::VectorXd fc = g.vector(3, -15.0, 20.0);
    const auto lin = linearize_for_mpc(m, fc);
    ASSERT_EQ(lin.size(), 3u);
    for (std::size_t t = 0; t < 3; ++t) {
      EXPECT_NEAR(lin[t].d_min, m.min_on_power(fc[static_cast<Eigen::Index>(t)]), 1e-12);
      EXPECT_NEAR(lin[t].d_max, m.max_on_power(fc[static_cast<Eigen::Index>(t)]), 1e-12);
      const double d = g.uniform(lin[t].d_min, lin[t].d_max);
      EXPECT_NEAR(lin[t].capacity(d), power_to_capacity(m, d, fc[static_cast<Eigen::Index>(t)]), 1e-9) << c;
    }
  }
}
