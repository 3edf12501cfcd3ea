#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>

#include "hvacsr/hvac/hvac_model.hpp"
#include "hvacsr/mpc/problem.hpp"
#include "hvacsr/plant/metrics.hpp"
#include "hvacsr/sr/affine_model.hpp"

namespace hvacsr::io {

using Json = nlohmann::ordered_json;

Json to_json(const sr::AffineModel& model);
sr::AffineModel affine_model_from_json(const Json& j);

/// {mode, rated_capacity_kw, rated_power_kw, load_min, levels: [{t_out_c, knots: [[q, d], ...]}]}
Json to_json(const hvac::HVACModel& model);
hvac::HVACModel hvac_model_from_json(const Json& j);

/// Snapshot of a built problem; restoring it gives a problem that solves identically.
Json to_json(const mpc::MPCProblem& problem);
mpc::MPCProblem problem_from_json(const Json& j);

Json to_json(const plant::MetricsReport& report);

Json read_json(const std::filesystem::path& path);
/// Two-space indent and a trailing newline.
void write_json(const Json& j, const std::filesystem::path& path);

}  // namespace hvacsr::io
