#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hvacsr/core/experiment_log.hpp"
#include "hvacsr/plant/metrics.hpp"

namespace hvacsr::io {

struct ChartSeries {
  std::string name;
  std::vector<double> x;  // hours since the first sample
  std::vector<double> y;  // NaN breaks the line
};

/// Static SVG line chart. Output depends only on the inputs.
std::string render_line_chart(const std::string& title, const std::string& y_label,
                              const std::vector<ChartSeries>& series);

/// One row per solve: timestamp, ok, objective, terms, nodes, qp_iterations[, wall_ms].
void write_solver_stats(std::ostream& out, const ExperimentLog& log, bool include_timing);

struct ReportOptions {
  // Wall-clock columns differ between otherwise identical runs, so they are opt-in.
  bool include_timing = false;
};

/// Writes <name>.csv per log, <name>_solves.csv for logs with solves, metrics.csv and
/// temperature.svg, power.svg, energy.svg overlaying every run. Returns the written paths.
std::vector<std::filesystem::path> emit_report(const std::vector<ExperimentLog>& logs,
                                               const std::vector<plant::MetricsReport>& metrics,
                                               const std::filesystem::path& out_dir, const ReportOptions& options = {});

}  // namespace hvacsr::io
