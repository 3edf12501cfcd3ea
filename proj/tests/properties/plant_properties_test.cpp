#include <gtest/gtest.h>

#include <cmath>

#include "hvacsr/core/lag_features.hpp"
#include "hvacsr/plant/experiment.hpp"
#include "hvacsr/plant/metrics.hpp"
#include "support.hpp"

using namespace hvacsr;
using namespace hvacsr::plant;
using testing_support::Gen;
using testing_support::kCases;

namespace {

RCParameters random_rc(Gen& g) {
  RCParameters p;
  p.r_ia *= g.uniform(0.7, 1.3);
  p.r_im *= g.uniform(0.7, 1.3);
  p.c_i *= g.uniform(0.7, 1.3);
  p.c_m *= g.uniform(0.7, 1.3);
  return p;
}

ExperimentConfig random_config(Gen& g) {
  ExperimentConfig c;
  c.start = testing_support::monday() + std::chrono::hours(24 * g.integer(0, 30));
  c.days = 1;
  c.preroll_days = 1;
  c.rc = random_rc(g);
  c.seed = static_cast<std::uint64_t>(g.integer(0, 1 << 30));
  return c;
}

SeriesFrame weather_for(const ExperimentConfig& c, Gen& g, int extra_steps) {
  WeatherProfile w;
  w.mean_c = g.uniform(-2.0, 8.0);
  const auto full = c.full_grid();
  return synthetic_weather(TimeGrid(full.start(), c.step, full.length() + static_cast<std::size_t>(extra_steps)), w,
                           static_cast<std::uint64_t>(g.integer(0, 1 << 30)));
}

// Least-squares affine room model on T_in[t], T_in[t-1], D[t], T_out[t] from excited thermostat data.
sr::AffineModel identify(const SeriesFrame& training) {
  const auto fm = build_lag_features(training, LagSpec{1, 1, true}, {"T_in", "D", "T_out"});
  const std::vector<std::string> names{"T_in[t]", "T_in[t-1]", "D[t]", "T_out[t]"};
  Eigen::MatrixXd a(fm.rows(), 5);
  for (std::size_t j = 0; j < names.size(); ++j) a.col(static_cast<Eigen::Index>(j)) = fm.x.col(fm.column_index(names[j]));
  a.col(4).setOnes();
  const Eigen::VectorXd b = a.colPivHouseholderQr().solve(fm.target);
  sr::AffineModel m;
  for (std::size_t j = 0; j < names.size(); ++j) m.terms.push_back({parse_feature_name(names[j]), b[static_cast<Eigen::Index>(j)]});
  m.intercept = b[4];
  return m;
}

}  // namespace

TEST(PlantProperties, LoggedEnergyAndCapacityAreConsistent) {
  const auto hvac = hvac::synthetic_heating_model();
  for (int c = 0; c < 100; ++c) {
    Gen g(testing_support::case_seed(501, c));
    const auto cfg = random_config(g);
    const auto log = run_experiment(ControllerKind::Thermostat, cfg, hvac, weather_for(cfg, g, 0));
    double energy = 0.0;
    for (std::size_t t = 0; t < log.frame.length(); ++t) {
      const double d = log.frame.at("D", t), t_out = log.frame.at("T_out", t);
      energy += d * log.frame.grid().step_hours();
      if (d == 0.0) {
        EXPECT_EQ(log.frame.at("Q", t), 0.0);
      } else {
        EXPECT_GE(d, hvac.min_on_power(t_out) - 1e-12) << c;
        EXPECT_LE(d, hvac.max_on_power(t_out) + 1e-12) << c;
        EXPECT_NEAR(log.frame.at("Q", t), hvac::power_to_capacity(hvac, d, t_out), 1e-12) << c;
      }
    }
    EXPECT_NEAR(metrics(log, cfg.comfort).energy_kwh, energy, 1e-9) << c;
  }
}

TEST(PlantProperties, SteadyStateBalancesHeatFlows) {
  for (int c = 0; c < kCases; ++c) {
    Gen g(testing_support::case_seed(502, c));
    const auto p = random_rc(g);
    const RCModel m(p, Seconds{60 * 15 * g.integer(1, 8)});
    const RCInputs u{g.uniform(-15.0, 15.0), g.uniform(0.0, 10.0), g.uniform(0.0, 2.0)};
    const auto ss = m.steady_state(u);
    EXPECT_NEAR((ss.t_i - u.t_out) / p.r_ia, u.q_hvac + u.gains, 1e-9) << c;
    EXPECT_NEAR(ss.t_m, ss.t_i, 1e-9) << c;
    // The air node moves toward the steady state from either side.
    const RCState x{ss.t_i + g.uniform(-5.0, 5.0), ss.t_m};
    const auto next = m.advance(x, u);
    EXPECT_LE(std::abs(next.t_i - ss.t_i), std::abs(x.t_i - ss.t_i) + 1e-12) << c;
  }
}

TEST(PlantProperties, HysteresisNeverChatters) {
  for (int c = 0; c < kCases; ++c) {
    Gen g(testing_support::case_seed(503, c));
    ThermostatConfig cfg;
    cfg.setpoint = g.uniform(18.0, 22.0);
    cfg.deadband = g.uniform(0.1, 1.0);
    ThermostatState s{g.coin()};
    double temp = cfg.setpoint + g.uniform(-2.0, 2.0);
    const Timestamp noon = testing_support::monday() + std::chrono::hours(12);
    for (int k = 0; k < 200; ++k) {
      temp += g.normal(0.0, 0.3);
      const bool before = s.on;
      const bool after = thermostat_step(cfg, s, temp, noon);
      const double need = cfg.setpoint - temp;
      if (std::abs(need) <= cfg.deadband) EXPECT_EQ(after, before) << c << " k=" << k;
      if (after && !before) EXPECT_GT(need, cfg.deadband);
      if (!after && before) EXPECT_LT(need, -cfg.deadband);
    }
  }
}

TEST(PlantProperties, PeakIgnoresZeroExtension) {
  for (int c = 0; c < kCases; ++c) {
    Gen g(testing_support::case_seed(504, c));
    // Whole days, so every complete averaging window inside the peak window already exists.
    const int n = 96 * g.integer(1, 3);
    Eigen::VectorXd d(n);
    for (int t = 0; t < n; ++t) d[t] = g.coin(0.6) ? g.uniform(0.5, 6.0) : 0.0;
    const ExperimentLog log(testing_support::make_frame(testing_support::monday(), kDefaultStep, {{"D", d}}));
    Eigen::VectorXd longer = Eigen::VectorXd::Zero(n + g.integer(1, 96));
    longer.head(n) = d;
    const ExperimentLog extended(testing_support::make_frame(testing_support::monday(), kDefaultStep, {{"D", longer}}));
    const auto a = metrics(log, {}), b = metrics(extended, {});
    EXPECT_DOUBLE_EQ(a.peak_kw, b.peak_kw) << c;
    EXPECT_DOUBLE_EQ(a.energy_kwh, b.energy_kwh) << c;
    const double k = g.uniform(0.5, 3.0);
    const ExperimentLog scaled(testing_support::make_frame(testing_support::monday(), kDefaultStep, {{"D", d * k}}));
    EXPECT_NEAR(metrics(scaled, {}).peak_kw, k * a.peak_kw, 1e-12 * std::max(1.0, a.peak_kw)) << c;
  }
}

TEST(PlantProperties, MpcComfortStaysNearTheThermostat) {
  const auto hvac = hvac::synthetic_heating_model();
  for (int c = 0; c < 100; ++c) {
    Gen g(testing_support::case_seed(505, c));
    auto cfg = random_config(g);
    cfg.preroll_days = 4;
    const int horizon = 24;
    const auto weather = weather_for(cfg, g, horizon);

    auto train = cfg;
    train.start = cfg.start - std::chrono::hours(24 * 3);
    train.preroll_days = 1;
    train.setpoint_excitation = 1.5;
    const auto model = identify(generate_training_data(train, hvac, weather, 3));

    const auto baseline = run_experiment(ControllerKind::Thermostat, cfg, hvac, weather);
    MpcSetup setup{model, hvac, {}, {}, horizon, {}};
    setup.scales = mpc::default_scales(baseline, cfg.comfort, setup.penalties, horizon);
    const auto run = run_experiment(ControllerKind::Mpc, cfg, hvac, weather, &setup);

    const auto mb = metrics(baseline, cfg.comfort), mm = metrics(run, cfg.comfort);
    EXPECT_LE(mm.comfort_rmse, 1.5 * mb.comfort_rmse + 1e-9)
        << c << " mpc " << mm.comfort_rmse << " thermostat " << mb.comfort_rmse;
  }
}
