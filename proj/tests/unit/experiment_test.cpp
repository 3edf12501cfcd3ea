#include <gtest/gtest.h>

#include <cmath>

#include "hvacsr/core/error.hpp"
#include "hvacsr/plant/experiment.hpp"
#include "support.hpp"

using namespace hvacsr;
using namespace hvacsr::plant;
using testing_support::monday;

namespace {

ExperimentConfig config() {
  ExperimentConfig c;
  c.start = monday();
  c.days = 1;
  c.preroll_days = 1;
  c.seed = 9;
  return c;
}

SeriesFrame weather_for(const ExperimentConfig& c, std::uint64_t seed = 3) {
  const auto full = c.full_grid();
  return synthetic_weather(TimeGrid(full.start(), c.step, full.length() + 96), {}, seed);
}

}  // namespace

TEST(Experiment, GridsCoverPrerollAndEvaluation) {
  const auto c = config();
  EXPECT_EQ(c.evaluation_grid().length(), 96u);
  EXPECT_EQ(c.full_grid().length(), 192u);
  EXPECT_EQ(c.full_grid().start(), monday() - std::chrono::hours(24));
}

TEST(Experiment, ThermostatRunLogsEveryChannel) {
  const auto c = config();
  const auto hvac = hvac::synthetic_heating_model();
  const auto log = run_experiment(ControllerKind::Thermostat, c, hvac, weather_for(c));
  EXPECT_EQ(log.name, "thermostat");
  EXPECT_EQ(log.frame.length(), 96u);
  for (auto ch : {"T_in", "T_out", "D", "Q", "occ", "setpoint"}) EXPECT_TRUE(log.frame.has_channel(ch)) << ch;
  EXPECT_TRUE(log.solves.empty());
  for (std::size_t t = 0; t < log.frame.length(); ++t) {
    const Timestamp ts = log.frame.grid().at(t);
    const double d = log.frame.at("D", t);
    if (!c.thermostat.operating_window.contains(ts)) EXPECT_EQ(d, 0.0);
    if (d > 0.0) {
      EXPECT_NEAR(log.frame.at("Q", t), hvac::power_to_capacity(hvac, d, log.frame.at("T_out", t)), 1e-12);
      EXPECT_GE(d, hvac.min_on_power(log.frame.at("T_out", t)) - 1e-12);
    }
  }
}

TEST(Experiment, RepeatRunsAreIdentical) {
  const auto c = config();
  const auto w = weather_for(c);
  const auto a = run_experiment(ControllerKind::Thermostat, c, hvac::synthetic_heating_model(), w);
  const auto b = run_experiment(ControllerKind::Thermostat, c, hvac::synthetic_heating_model(), w);
  EXPECT_TRUE(a.frame == b.frame);
}

TEST(Experiment, ExcitationMovesTheSetpoint) {
  auto c = config();
  c.setpoint_excitation = 2.0;
  const auto frame = generate_training_data(c, hvac::synthetic_heating_model(), weather_for(c), 1);
  double lo = 1e9, hi = -1e9;
  for (std::size_t t = 0; t < frame.length(); ++t) {
    if (frame.is_missing("setpoint", t)) continue;
    lo = std::min(lo, frame.at("setpoint", t));
    hi = std::max(hi, frame.at("setpoint", t));
  }
  EXPECT_GT(hi - lo, 0.1);
  EXPECT_GE(lo, 18.0);
  EXPECT_LE(hi, 22.0);
}

TEST(Experiment, MpcWithoutSetupIsAConfigError) {
  const auto c = config();
  EXPECT_THROW(run_experiment(ControllerKind::Mpc, c, hvac::synthetic_heating_model(), weather_for(c)), ConfigError);
}

TEST(Experiment, ShortWeatherIsADataError) {
  const auto c = config();
  const auto w = synthetic_weather(TimeGrid(c.full_grid().start(), c.step, 100), {}, 1);
  EXPECT_THROW(run_experiment(ControllerKind::Thermostat, c, hvac::synthetic_heating_model(), w), DataError);
}

TEST(Experiment, ParsesControllerNames) {
  EXPECT_EQ(parse_controller("mpc"), ControllerKind::Mpc);
  EXPECT_EQ(parse_controller("thermostat"), ControllerKind::Thermostat);
  EXPECT_THROW(parse_controller("furnace"), ConfigError);
}

TEST(Experiment, GainsFollowOccupancyAndDaylight) {
  const GainProfile g;
  EXPECT_DOUBLE_EQ(g.at(monday() + std::chrono::hours(3)), 0.0);
  EXPECT_NEAR(g.at(monday() + std::chrono::hours(12)), 0.4 + 0.8, 1e-12);
}
