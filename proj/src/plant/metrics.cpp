#include "hvacsr/plant/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hvacsr/core/error.hpp"

namespace hvacsr::plant {

MetricsReport metrics(const ExperimentLog& log, const ComfortSpec& comfort, const MetricsConfig& config) {
  const auto& f = log.frame;
  const std::size_t n = f.length();
  if (n == 0 || !f.has_channel(channel::kPower)) throw DataError("metrics need a non-empty log with D");
  const auto step = f.grid().step();
  if (config.averaging.count() % step.count() != 0) {
    throw ConfigError("peak averaging period must be a multiple of the log step");
  }
  const auto width = static_cast<std::size_t>(config.averaging.count() / step.count());
  const double dt_h = f.grid().step_hours();

  MetricsReport r;
  r.name = log.name;
  const auto& d = f.values(channel::kPower);
  for (std::size_t t = 0; t < n; ++t) {
    if (!f.is_missing(channel::kPower, t)) r.energy_kwh += d[static_cast<Eigen::Index>(t)] * dt_h;
  }
  for (std::size_t t = 0; t + width <= n; ++t) {
    double sum = 0.0;
    bool inside = true;
    for (std::size_t k = t; k < t + width && inside; ++k) {
      inside = config.peak_window.contains(f.grid().at(k), config.utc_offset) && !f.is_missing(channel::kPower, k);
      sum += d[static_cast<Eigen::Index>(k)];
    }
    if (inside) r.peak_kw = std::max(r.peak_kw, sum / static_cast<double>(width));
  }

  if (f.has_channel(channel::kRoomTemp)) {
    const bool has_occ = f.has_channel(channel::kOccupancy);
    double sq = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const Timestamp ts = f.grid().at(t);
      const bool occ = has_occ ? (!f.is_missing(channel::kOccupancy, t) && f.at(channel::kOccupancy, t) > 0.5)
                               : comfort.occupied(ts);
      if (!occ || f.is_missing(channel::kRoomTemp, t)) continue;
      const double temp = f.at(channel::kRoomTemp, t);
      sq += (temp - comfort.comfort_temp) * (temp - comfort.comfort_temp);
      r.violation_degree_hours += std::max({0.0, comfort.lower - temp, temp - comfort.upper}) * dt_h;
      ++r.occupied_steps;
    }
    if (r.occupied_steps > 0) r.comfort_rmse = std::sqrt(sq / r.occupied_steps);
  }
  return r;
}

double peak_reduction(const MetricsReport& baseline, const MetricsReport& proposed) {
  if (!(baseline.peak_kw > 0.0)) throw DataError("baseline peak is zero");
  return (baseline.peak_kw - proposed.peak_kw) / baseline.peak_kw;
}

double energy_delta(const MetricsReport& baseline, const MetricsReport& proposed) {
  if (!(baseline.energy_kwh > 0.0)) throw DataError("baseline energy is zero");
  return (proposed.energy_kwh - baseline.energy_kwh) / baseline.energy_kwh;
}

}  // namespace hvacsr::plant
