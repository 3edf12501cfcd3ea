#include "hvacsr/io/json_io.hpp"

#include <fstream>

#include "hvacsr/core/error.hpp"

namespace hvacsr::io {

namespace {

template <typename T>
T field(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) throw DataError(std::string(what) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DataError(std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

Json vec(const Eigen::VectorXd& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vec_from(const Json& j, const char* key) {
  const auto v = field<std::vector<double>>(j, key, "problem");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

Json to_json(const sr::AffineModel& m) {
  Json terms = Json::array();
  for (const auto& t : m.terms) terms.push_back({{"feature", t.column.name()}, {"coefficient", t.coefficient}});
  Json j;
  j["kind"] = "affine-model";
  j["equation"] = m.equation(4);
  j["intercept"] = m.intercept;
  j["terms"] = terms;
  j["complexity"] = m.complexity;
  j["training_mse"] = std::isfinite(m.training_mse) ? Json(m.training_mse) : Json(nullptr);
  return j;
}

sr::AffineModel affine_model_from_json(const Json& j) {
  sr::AffineModel m;
  m.intercept = field<double>(j, "intercept", "affine model");
  const auto terms = field<Json>(j, "terms", "affine model");
  if (!terms.is_array()) throw DataError("affine model: 'terms' must be an array");
  for (const auto& t : terms) {
    sr::AffineTerm term;
    try {
      term.column = parse_feature_name(field<std::string>(t, "feature", "affine term"));
    } catch (const Error& e) {
      throw DataError(std::string("affine model: ") + e.what());
    }
    term.coefficient = field<double>(t, "coefficient", "affine term");
    m.terms.push_back(term);
  }
  if (j.contains("complexity")) m.complexity = field<int>(j, "complexity", "affine model");
  if (j.contains("training_mse") && j.at("training_mse").is_number()) m.training_mse = j.at("training_mse").get<double>();
  return m;
}

Json to_json(const hvac::HVACModel& m) {
  Json levels = Json::array();
  for (const auto& l : m.levels()) {
    Json knots = Json::array();
    for (Eigen::Index k = 0; k < l.curve.knots(); ++k) knots.push_back({l.curve.capacity()[k], l.curve.power()[k]});
    levels.push_back({{"t_out_c", l.t_out_c}, {"knots", knots}});
  }
  Json j;
  j["mode"] = hvac::to_string(m.mode());
  j["rated_capacity_kw"] = m.q_max();
  j["rated_power_kw"] = m.rated_power();
  j["load_min"] = m.load_min();
  j["levels"] = levels;
  return j;
}

hvac::HVACModel hvac_model_from_json(const Json& j) {
  const auto mode = hvac::parse_mode(field<std::string>(j, "mode", "hvac model"));
  std::vector<hvac::AmbientLevel> levels;
  const auto lv = field<Json>(j, "levels", "hvac model");
  if (!lv.is_array() || lv.empty()) throw DataError("hvac model: 'levels' must be a non-empty array");
  for (const auto& l : lv) {
    const auto knots = field<std::vector<std::array<double, 2>>>(l, "knots", "hvac level");
    Eigen::VectorXd q(static_cast<Eigen::Index>(knots.size())), d(static_cast<Eigen::Index>(knots.size()));
    for (std::size_t k = 0; k < knots.size(); ++k) {
      q[static_cast<Eigen::Index>(k)] = knots[k][0];
      d[static_cast<Eigen::Index>(k)] = knots[k][1];
    }
    levels.push_back({field<double>(l, "t_out_c", "hvac level"), hvac::PWLCurve(q, d)});
  }
  return hvac::HVACModel(std::move(levels), field<double>(j, "rated_capacity_kw", "hvac model"),
                         field<double>(j, "rated_power_kw", "hvac model"), field<double>(j, "load_min", "hvac model"),
                         mode);
}

Json to_json(const mpc::MPCProblem& p) {
  Json hv = Json::array();
  for (const auto& s : p.hvac) {
    Json segs = Json::array();
    for (const auto& g : s.segments) segs.push_back({g.d_lo, g.d_hi, g.alpha, g.beta});
    hv.push_back({{"d_min", s.d_min}, {"d_max", s.d_max}, {"segments", segs}});
  }
  Json j;
  j["kind"] = "mpc-problem";
  j["start"] = format_iso8601(p.grid.start());
  j["step_s"] = p.grid.step().count();
  j["horizon"] = p.horizon;
  j["comfort_temp"] = p.comfort_temp;
  j["previous_power"] = p.previous_power;
  j["free_response"] = vec(p.free_response);
  Json resp = Json::array();
  for (Eigen::Index r = 0; r < p.response.rows(); ++r) resp.push_back(vec(p.response.row(r).transpose()));
  j["response"] = resp;
  j["occupancy"] = vec(p.occupancy);
  j["lower"] = vec(p.lower);
  j["upper"] = vec(p.upper);
  j["ramp_weight"] = vec(p.ramp_weight);
  j["d_min"] = vec(p.d_min);
  j["d_max"] = vec(p.d_max);
  j["hvac"] = hv;
  j["penalties"] = {{"slack_penalty", p.penalties.slack_penalty},
                    {"gamma_peak", p.penalties.gamma_peak},
                    {"peak_window", p.penalties.peak_window.to_string()},
                    {"utc_offset_s", p.penalties.utc_offset.count()}};
  j["scales"] = {{"energy", p.scales.energy_scale},
                 {"comfort", p.scales.comfort_scale},
                 {"ramp", p.scales.ramp_scale},
                 {"slack", p.scales.slack_scale}};
  return j;
}

mpc::MPCProblem problem_from_json(const Json& j) {
  mpc::MPCProblem p;
  p.horizon = field<int>(j, "horizon", "problem");
  if (p.horizon < 1) throw DataError("problem: horizon must be positive");
  p.grid = TimeGrid(parse_iso8601(field<std::string>(j, "start", "problem")),
                    Seconds{field<long>(j, "step_s", "problem")}, static_cast<std::size_t>(p.horizon));
  p.comfort_temp = field<double>(j, "comfort_temp", "problem");
  p.previous_power = field<double>(j, "previous_power", "problem");
  p.free_response = vec_from(j, "free_response");
  const auto resp = field<std::vector<std::vector<double>>>(j, "response", "problem");
  p.response = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(resp.size()), p.horizon);
  for (std::size_t r = 0; r < resp.size(); ++r) {
    if (static_cast<int>(resp[r].size()) != p.horizon) throw DataError("problem: response row has the wrong width");
    for (int c = 0; c < p.horizon; ++c) p.response(static_cast<Eigen::Index>(r), c) = resp[r][static_cast<std::size_t>(c)];
  }
  p.occupancy = vec_from(j, "occupancy");
  p.lower = vec_from(j, "lower");
  p.upper = vec_from(j, "upper");
  p.ramp_weight = vec_from(j, "ramp_weight");
  p.d_min = vec_from(j, "d_min");
  p.d_max = vec_from(j, "d_max");
  for (const auto& s : field<Json>(j, "hvac", "problem")) {
    hvac::StepLinearization lin;
    lin.d_min = field<double>(s, "d_min", "hvac step");
    lin.d_max = field<double>(s, "d_max", "hvac step");
    for (const auto& g : field<std::vector<std::array<double, 4>>>(s, "segments", "hvac step")) {
      lin.segments.push_back({g[0], g[1], g[2], g[3]});
    }
    p.hvac.push_back(std::move(lin));
  }
  const auto pen = field<Json>(j, "penalties", "problem");
  p.penalties.slack_penalty = field<double>(pen, "slack_penalty", "penalties");
  p.penalties.gamma_peak = field<double>(pen, "gamma_peak", "penalties");
  p.penalties.peak_window = DailyWindow::parse(field<std::string>(pen, "peak_window", "penalties"));
  p.penalties.utc_offset = Seconds{field<long>(pen, "utc_offset_s", "penalties")};
  const auto sc = field<Json>(j, "scales", "problem");
  p.scales = {field<double>(sc, "energy", "scales"), field<double>(sc, "comfort", "scales"),
              field<double>(sc, "ramp", "scales"), field<double>(sc, "slack", "scales")};
  try {
    p.validate();
  } catch (const Error& e) {
    throw DataError(std::string("problem: ") + e.what());
  }
  return p;
}

Json to_json(const plant::MetricsReport& r) {
  Json j;
  j["name"] = r.name;
  j["peak_kw"] = r.peak_kw;
  j["energy_kwh"] = r.energy_kwh;
  j["comfort_rmse"] = r.comfort_rmse;
  j["violation_degree_hours"] = r.violation_degree_hours;
  j["occupied_steps"] = r.occupied_steps;
  return j;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace hvacsr::io
