#pragma once

#include <string>

#include "hvacsr/core/comfort.hpp"
#include "hvacsr/core/experiment_log.hpp"

namespace hvacsr::plant {

struct MetricsConfig {
  DailyWindow peak_window = DailyWindow::hours(5, 10);
  Seconds averaging{1800};
  Seconds utc_offset{0};
};

struct MetricsReport {
  std::string name;
  double peak_kw = 0.0;
  double energy_kwh = 0.0;
  double comfort_rmse = 0.0;
  double violation_degree_hours = 0.0;
  int occupied_steps = 0;
};

/// Peak is the largest rolling mean of D over `averaging` whose samples all fall in the peak
/// window. Comfort terms use the log's occ channel when present, the comfort window otherwise.
MetricsReport metrics(const ExperimentLog& log, const ComfortSpec& comfort, const MetricsConfig& config = {});

/// (baseline - proposed) / baseline.
double peak_reduction(const MetricsReport& baseline, const MetricsReport& proposed);
double energy_delta(const MetricsReport& baseline, const MetricsReport& proposed);

}  // namespace hvacsr::plant
