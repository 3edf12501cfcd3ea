#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hvacsr/core/series_frame.hpp"

namespace hvacsr {

/// Normalized objective terms of one schedule.
struct ObjectiveTerms {
  double energy = 0.0;
  double comfort = 0.0;
  double ramp = 0.0;
  double slack = 0.0;

  double total() const { return energy + comfort + ramp + slack; }
};

struct SolveRecord {
  Timestamp time{};
  bool ok = true;
  double objective = 0.0;
  ObjectiveTerms terms;
  int nodes = 0;
  int qp_iterations = 0;
  double wall_ms = 0.0;
};

/// Closed-loop trace. The frame carries T_in, T_out, D, Q, occ and setpoint.
struct ExperimentLog {
  std::string name;
  std::uint64_t seed = 0;
  SeriesFrame frame;
  std::vector<SolveRecord> solves;

  explicit ExperimentLog(SeriesFrame f, std::string n = {}, std::uint64_t s = 0)
      : name(std::move(n)), seed(s), frame(std::move(f)) {}
};

}  // namespace hvacsr
