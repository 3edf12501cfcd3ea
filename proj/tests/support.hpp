#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hvacsr/core/series_frame.hpp"
#include "hvacsr/hvac/hvac_model.hpp"
#include "hvacsr/mpc/problem.hpp"
#include "hvacsr/sr/affine_model.hpp"

namespace testing_support {

inline constexpr int kCases = 200;

// Hand-rolled generator: one seeded engine per case so failures replay from the case index.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  double normal(double mean, double sd) { return std::normal_distribution<double>(mean, sd)(rng_); }
  std::mt19937_64& engine() { return rng_; }

  Eigen::VectorXd vector(Eigen::Index n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 rng_;
};

inline std::uint64_t case_seed(std::uint64_t suite, int c) { return suite * 1000003ULL + static_cast<std::uint64_t>(c); }

inline hvacsr::Timestamp monday() { return hvacsr::make_timestamp(2023, 1, 16); }

inline hvacsr::SeriesFrame make_frame(hvacsr::Timestamp start, hvacsr::Seconds step,
                                      const std::vector<std::pair<std::string, Eigen::VectorXd>>& channels) {
  const auto n = static_cast<std::size_t>(channels.front().second.size());
  hvacsr::SeriesFrame f(hvacsr::TimeGrid(start, step, n));
  for (const auto& [name, v] : channels) f.set_channel(name, v);
  return f;
}

inline hvacsr::sr::AffineModel first_order_model(double a, double b, double c, double k) {
  hvacsr::sr::AffineModel m;
  m.intercept = k;
  m.terms = {{{"T_in", 0}, a}, {{"D", 0}, b}, {{"T_out", 0}, c}};
  return m;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hvacsr-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 14-day style identification data from a known second-order law:
// T_in[t+1] = 0.754 T_in[t] - 0.162 T_in[t-60] - 1.0 D[t] + 10.445 + N(0, noise^2).
// D holds a random level for 1-4 hours at a time so both lags are excited.
inline hvacsr::SeriesFrame planted_frame(std::uint64_t seed, int days, double noise = 0.05) {
  Gen g(seed);
  const int n = days * 96;
  Eigen::VectorXd t_in(n), d(n);
  double level = 0.0;
  int hold = 0;
  for (int t = 0; t < n; ++t) {
    if (hold-- <= 0) {
      level = g.coin(0.4) ? 0.0 : g.uniform(0.5, 4.0);
      hold = g.integer(4, 16);
    }
    d[t] = level;
  }
  for (int t = 0; t < n; ++t) {
    if (t <= 60) {
      t_in[t] = 20.0 + g.normal(0.0, 0.5);
      continue;
    }
    t_in[t] = 0.754 * t_in[t - 1] - 0.162 * t_in[t - 61] - 1.0 * d[t - 1] + 10.445 + g.normal(0.0, noise);
  }
  return make_frame(monday(), hvacsr::kDefaultStep, {{"T_in", t_in}, {"D", d}});
}

// Random small scheduling instance built through the public builder. Demand is kept low so
// the relaxed optimum regularly lands inside the off/on gap and branching is exercised.
inline hvacsr::mpc::MPCProblem random_problem(Gen& g, int horizon) {
  using namespace hvacsr;
  const double a = g.uniform(0.6, 0.98);
  const double b = g.uniform(0.05, 0.6);
  const double c = 1.0 - a;
  const auto model = first_order_model(a, b, c, g.uniform(-0.5, 0.5));

  const double t_out = g.uniform(-10.0, 15.0);
  mpc::MPCState state;
  state.now = monday() + std::chrono::hours(g.integer(0, 23));
  state.t_in = {g.uniform(14.0, 22.0)};
  state.power = {g.coin(0.3) ? g.uniform(0.0, 4.0) : 0.0};
  state.t_out = {t_out};

  mpc::Forecasts fc;
  fc.t_out = Eigen::VectorXd::Constant(horizon, t_out) + g.vector(horizon, -1.0, 1.0);
  fc.occupancy = Eigen::VectorXd(horizon);
  for (int t = 0; t < horizon; ++t) fc.occupancy[t] = g.coin(0.7) ? 1.0 : 0.0;

  ComfortSpec comfort;
  comfort.comfort_temp = g.uniform(18.0, 22.0);
  comfort.lower = comfort.comfort_temp - g.uniform(0.5, 3.0);
  comfort.upper = comfort.comfort_temp + g.uniform(0.5, 3.0);
  comfort.occupied_window = DailyWindow::hours(0, 24);

  mpc::PenaltyConfig pen;
  pen.slack_penalty = g.uniform(1.0, 200.0);
  pen.gamma_peak = g.uniform(1.5, 8.0);
  pen.peak_window = DailyWindow::hours(g.integer(0, 12), g.integer(13, 23));

  mpc::NormalizationScales sc{g.uniform(0.5, 20.0), g.uniform(0.1, 20.0), g.uniform(0.5, 20.0), g.uniform(0.5, 5.0)};
  return mpc::build_problem(state, fc, model, hvac::synthetic_heating_model(), comfort, pen, sc, horizon);
}

// Objective of a power trajectory with slack and ramp at their smallest feasible values,
// computed directly from the problem data.
inline double direct_objective(const hvacsr::mpc::MPCProblem& p, const Eigen::VectorXd& d) {
  const int T = p.horizon;
  const Eigen::VectorXd temp = p.free_response + p.response * d;
  double energy = p.step_hours() * d.sum() / p.scales.energy_scale;
  double comfort = 0.0, slack = 0.0, ramp = 0.0;
  double prev = p.previous_power;
  for (int t = 0; t < T; ++t) {
    ramp = std::max(ramp, p.ramp_weight[t] * (d[t] - prev));
    prev = d[t];
  }
  for (int t = 1; t <= T; ++t) {
    comfort += p.occupancy[t] * std::pow(temp[t] - p.comfort_temp, 2);
    slack += std::max({0.0, p.lower[t] - temp[t], temp[t] - p.upper[t]});
  }
  return energy + comfort / p.scales.comfort_scale + ramp / p.scales.ramp_scale +
         p.penalties.slack_penalty * slack / p.scales.slack_scale;
}

}  // namespace testing_support
