#include "hvacsr/app/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "hvacsr/core/error.hpp"

namespace hvacsr::app {

namespace {

// Reads known keys of one JSON object and rejects the rest.
class Section {
 public:
  Section(const io::Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(name(key) + ": wrong type");
    }
  }

  void get_path(const char* key, std::filesystem::path& out) {
    std::string s = out.string();
    get(key, s);
    out = s;
  }

  void get_window(const char* key, DailyWindow& out) {
    std::string s = out.to_string();
    get(key, s);
    try {
      out = DailyWindow::parse(s);
    } catch (const Error& e) {
      throw ConfigError(name(key) + ": " + e.what());
    }
  }

  void get_ms(const char* key, std::chrono::milliseconds& out) {
    long v = static_cast<long>(out.count());
    get(key, v);
    out = std::chrono::milliseconds{v};
  }

  Section sub(const char* key) {
    seen_.insert(key);
    static const io::Json empty = io::Json::object();
    return Section(j_.contains(key) ? j_.at(key) : empty, name(key));
  }

  bool has(const char* key) const { return j_.contains(key); }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(name(k.c_str()) + ": unknown key");
    }
  }

  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const io::Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const char* source_name(WeatherSource s) {
  switch (s) {
    case WeatherSource::Synthetic: return "synthetic";
    case WeatherSource::Replay: return "replay";
    case WeatherSource::Http: return "http";
  }
  return "synthetic";
}

WeatherSource parse_source(const std::string& s) {
  if (s == "synthetic") return WeatherSource::Synthetic;
  if (s == "replay") return WeatherSource::Replay;
  if (s == "http") return WeatherSource::Http;
  throw ConfigError("weather.source: expected synthetic, replay or http, got '" + s + "'");
}

}  // namespace

void RunConfig::validate() const {
  if (days < 1) throw ConfigError("experiment.days must be at least 1");
  if (preroll_days < 0) throw ConfigError("experiment.preroll_days must be non-negative");
  if (training_days < 1) throw ConfigError("experiment.training_days must be at least 1");
  if (step_minutes <= 0 || 1440 % step_minutes != 0) throw ConfigError("experiment.step_minutes must divide a day");
  if (setpoint_excitation < 0.0) throw ConfigError("experiment.setpoint_excitation must be non-negative");
  if (excitation_hold_minutes <= 0) throw ConfigError("experiment.excitation_hold_minutes must be positive");
  if (horizon < 1) throw ConfigError("mpc.horizon must be at least 1");
  if (bnb.node_limit < 1) throw ConfigError("mpc.node_limit must be positive");
  if (bnb.mip_gap < 0.0) throw ConfigError("mpc.mip_gap must be non-negative");
  if (lag_channels.empty()) throw ConfigError("lags.channels must not be empty");
  for (const auto& c : lag_channels) {
    if (c != channel::kRoomTemp && c != channel::kPower && c != channel::kAmbientTemp) {
      throw ConfigError("lags.channels: '" + c + "' is not one of T_in, D, T_out");
    }
  }
  if (hvac_fit.segments < 1) throw ConfigError("hvac.fit_segments must be at least 1");
  if (hvac_fit.samples_per_level < hvac_fit.segments + 1) {
    throw ConfigError("hvac.samples_per_level must exceed fit_segments");
  }
  if (hvac_fit.noise_kw < 0.0) throw ConfigError("hvac.noise_kw must be non-negative");
  if (weather.source == WeatherSource::Replay && weather.replay_file.empty()) {
    throw ConfigError("weather.replay_file is required for source = replay");
  }
  if (!training_data.empty() && !std::filesystem::exists(training_data)) {
    throw ConfigError("paths.training_data does not exist: " + training_data.string());
  }
  if (!weather.replay_file.empty() && !std::filesystem::exists(weather.replay_file)) {
    throw ConfigError("weather.replay_file does not exist: " + weather.replay_file.string());
  }
  if (!hvac_fit.catalog.empty() && !std::filesystem::exists(hvac_fit.catalog)) {
    throw ConfigError("hvac.catalog does not exist: " + hvac_fit.catalog.string());
  }
  lags.validate();
  gp.validate();
  comfort.validate();
  penalties.validate();
  thermostat.validate();
  rc.validate();
  weather.http.validate();
}

RunConfig config_from_json(const io::Json& j) {
  RunConfig c;
  Section root(j, "");
  std::uint64_t seed = c.seed;
  root.get("seed", seed);
  c.seed = seed;

  auto paths = root.sub("paths");
  paths.get_path("training_data", c.training_data);
  paths.get_path("model_dir", c.model_dir);
  paths.get_path("output_dir", c.output_dir);
  paths.finish();

  auto ex = root.sub("experiment");
  std::string start = format_iso8601(c.start);
  ex.get("start", start);
  try {
    c.start = parse_iso8601(start);
  } catch (const Error& e) {
    throw ConfigError(std::string("experiment.start: ") + e.what());
  }
  ex.get("days", c.days);
  ex.get("preroll_days", c.preroll_days);
  ex.get("training_days", c.training_days);
  ex.get("step_minutes", c.step_minutes);
  ex.get("setpoint_excitation", c.setpoint_excitation);
  ex.get("excitation_hold_minutes", c.excitation_hold_minutes);
  ex.get("utc_offset_minutes", c.utc_offset_minutes);
  ex.finish();

  auto w = root.sub("weather");
  std::string source = source_name(c.weather.source);
  w.get("source", source);
  c.weather.source = parse_source(source);
  w.get_path("replay_file", c.weather.replay_file);
  w.get("mean_c", c.weather.profile.mean_c);
  w.get("amplitude_c", c.weather.profile.amplitude_c);
  w.get("day_jitter_c", c.weather.profile.day_jitter_c);
  w.get("noise_c", c.weather.profile.noise_c);
  w.get("forecast_bias_c", c.weather.forecast_bias_c);
  w.get("forecast_noise_c", c.weather.forecast_noise_c);
  auto http = w.sub("http");
  http.get("endpoint", c.weather.http.endpoint);
  http.get("lat", c.weather.http.lat);
  http.get("lon", c.weather.http.lon);
  http.get("api_key_env", c.weather.http.api_key_env);
  std::string unit = c.weather.http.unit == io::TemperatureUnit::Kelvin ? "kelvin" : "celsius";
  http.get("unit", unit);
  c.weather.http.unit = io::parse_unit(unit);
  http.get_ms("timeout_ms", c.weather.http.timeout);
  http.get("retries", c.weather.http.retries);
  http.get_ms("backoff_ms", c.weather.http.backoff);
  http.finish();
  w.finish();

  auto lags = root.sub("lags");
  lags.get("resolution", c.lags.resolution);
  lags.get("depth", c.lags.depth);
  lags.get("include_minus_one", c.lags.include_minus_one);
  lags.get("channels", c.lag_channels);
  lags.finish();

  auto gp = root.sub("gp");
  gp.get("population_size", c.gp.population_size);
  gp.get("generations", c.gp.generations);
  gp.get("tournament_size", c.gp.tournament_size);
  gp.get("crossover_prob", c.gp.crossover_prob);
  gp.get("mutation_prob", c.gp.mutation_prob);
  gp.get("max_complexity", c.gp.max_complexity);
  gp.get("parsimony", c.gp.parsimony);
  gp.get("restarts", c.gp.restarts);
  gp.get("workers", c.gp.workers);
  gp.get("init_max_depth", c.gp.init_max_depth);
  gp.get("elite", c.gp.elite);
  gp.finish();

  auto cf = root.sub("comfort");
  cf.get("comfort_temp", c.comfort.comfort_temp);
  cf.get("lower", c.comfort.lower);
  cf.get("upper", c.comfort.upper);
  cf.get_window("occupied_window", c.comfort.occupied_window);
  cf.get("setback_lower", c.comfort.setback_lower);
  cf.get("setback_upper", c.comfort.setback_upper);
  cf.finish();

  auto pen = root.sub("penalties");
  pen.get("slack_penalty", c.penalties.slack_penalty);
  pen.get("gamma_peak", c.penalties.gamma_peak);
  pen.get_window("peak_window", c.penalties.peak_window);
  pen.finish();

  auto m = root.sub("mpc");
  m.get("horizon", c.horizon);
  m.get("mip_gap", c.bnb.mip_gap);
  m.get("node_limit", c.bnb.node_limit);
  m.finish();

  auto th = root.sub("thermostat");
  th.get("setpoint", c.thermostat.setpoint);
  th.get("deadband", c.thermostat.deadband);
  th.get_window("operating_window", c.thermostat.operating_window);
  th.finish();

  auto pl = root.sub("plant");
  pl.get("r_ia", c.rc.r_ia);
  pl.get("r_im", c.rc.r_im);
  pl.get("c_i", c.rc.c_i);
  pl.get("c_m", c.rc.c_m);
  pl.get("initial_t_i", c.initial.t_i);
  pl.get("initial_t_m", c.initial.t_m);
  pl.get("internal_gain_kw", c.gains.internal_kw);
  pl.get("solar_peak_kw", c.gains.solar_peak_kw);
  pl.get_window("daylight_window", c.gains.daylight);
  pl.finish();

  auto hv = root.sub("hvac");
  hv.get_path("catalog", c.hvac_fit.catalog);
  hv.get("fit_segments", c.hvac_fit.segments);
  hv.get("samples_per_level", c.hvac_fit.samples_per_level);
  hv.get("noise_kw", c.hvac_fit.noise_kw);
  hv.finish();

  auto out = root.sub("output");
  out.get("include_timing", c.include_timing);
  out.finish();
  root.finish();

  const Seconds off = c.utc_offset();
  c.comfort.utc_offset = off;
  c.penalties.utc_offset = off;
  c.thermostat.utc_offset = off;
  c.gains.utc_offset = off;
  c.gains.occupied = c.comfort.occupied_window;
  c.validate();
  return c;
}

io::Json to_json(const RunConfig& c) {
  io::Json j;
  j["seed"] = c.seed;
  j["paths"] = {{"training_data", c.training_data.string()},
                {"model_dir", c.model_dir.string()},
                {"output_dir", c.output_dir.string()}};
  j["experiment"] = {{"start", format_iso8601(c.start)},
                     {"days", c.days},
                     {"preroll_days", c.preroll_days},
                     {"training_days", c.training_days},
                     {"step_minutes", c.step_minutes},
                     {"setpoint_excitation", c.setpoint_excitation},
                     {"excitation_hold_minutes", c.excitation_hold_minutes},
                     {"utc_offset_minutes", c.utc_offset_minutes}};
  j["weather"] = {{"source", source_name(c.weather.source)},
                  {"replay_file", c.weather.replay_file.string()},
                  {"mean_c", c.weather.profile.mean_c},
                  {"amplitude_c", c.weather.profile.amplitude_c},
                  {"day_jitter_c", c.weather.profile.day_jitter_c},
                  {"noise_c", c.weather.profile.noise_c},
                  {"forecast_bias_c", c.weather.forecast_bias_c},
                  {"forecast_noise_c", c.weather.forecast_noise_c},
                  {"http",
                   {{"endpoint", c.weather.http.endpoint},
                    {"lat", c.weather.http.lat},
                    {"lon", c.weather.http.lon},
                    {"api_key_env", c.weather.http.api_key_env},
                    {"unit", c.weather.http.unit == io::TemperatureUnit::Kelvin ? "kelvin" : "celsius"},
                    {"timeout_ms", c.weather.http.timeout.count()},
                    {"retries", c.weather.http.retries},
                    {"backoff_ms", c.weather.http.backoff.count()}}}};
  j["lags"] = {{"resolution", c.lags.resolution},
               {"depth", c.lags.depth},
               {"include_minus_one", c.lags.include_minus_one},
               {"channels", c.lag_channels}};
  j["gp"] = {{"population_size", c.gp.population_size}, {"generations", c.gp.generations},
             {"tournament_size", c.gp.tournament_size}, {"crossover_prob", c.gp.crossover_prob},
             {"mutation_prob", c.gp.mutation_prob},     {"max_complexity", c.gp.max_complexity},
             {"parsimony", c.gp.parsimony},             {"restarts", c.gp.restarts},
             {"workers", c.gp.workers},                 {"init_max_depth", c.gp.init_max_depth},
             {"elite", c.gp.elite}};
  j["comfort"] = {{"comfort_temp", c.comfort.comfort_temp},
                  {"lower", c.comfort.lower},
                  {"upper", c.comfort.upper},
                  {"occupied_window", c.comfort.occupied_window.to_string()},
                  {"setback_lower", c.comfort.setback_lower},
                  {"setback_upper", c.comfort.setback_upper}};
  j["penalties"] = {{"slack_penalty", c.penalties.slack_penalty},
                    {"gamma_peak", c.penalties.gamma_peak},
                    {"peak_window", c.penalties.peak_window.to_string()}};
  j["mpc"] = {{"horizon", c.horizon}, {"mip_gap", c.bnb.mip_gap}, {"node_limit", c.bnb.node_limit}};
  j["thermostat"] = {{"setpoint", c.thermostat.setpoint},
                     {"deadband", c.thermostat.deadband},
                     {"operating_window", c.thermostat.operating_window.to_string()}};
  j["plant"] = {{"r_ia", c.rc.r_ia},
                {"r_im", c.rc.r_im},
                {"c_i", c.rc.c_i},
                {"c_m", c.rc.c_m},
                {"initial_t_i", c.initial.t_i},
                {"initial_t_m", c.initial.t_m},
                {"internal_gain_kw", c.gains.internal_kw},
                {"solar_peak_kw", c.gains.solar_peak_kw},
                {"daylight_window", c.gains.daylight.to_string()}};
  j["hvac"] = {{"catalog", c.hvac_fit.catalog.string()},
               {"fit_segments", c.hvac_fit.segments},
               {"samples_per_level", c.hvac_fit.samples_per_level},
               {"noise_kw", c.hvac_fit.noise_kw}};
  j["output"] = {{"include_timing", c.include_timing}};
  return j;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  io::Json j;
  try {
    j = io::Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::string default_config_text() {
  return R"(// hvacsr run configuration. JSON with // comments; omitted keys take these defaults.
{
  // Root of every random stream (weather, excitation, GP, HVAC fit, forecast noise).
  "seed": 42,
  "paths": {
    // Training CSV (timestamp,T_in,T_out,D,...). Empty: generate it from the synthetic plant.
    "training_data": "",
    "model_dir": "models",
    "output_dir": "runs"
  },
  "experiment": {
    "start": "2023-01-16T00:00:00Z",
    "days": 1,
    // Thermostat operation before the start; builds the lag history the predictor needs.
    "preroll_days": 2,
    "training_days": 14,
    "step_minutes": 15,
    // Uniform +/- range applied to the thermostat setpoint while generating training data.
    "setpoint_excitation": 1.5,
    "excitation_hold_minutes": 120,
    // Local time = UTC + offset; all daily windows are local.
    "utc_offset_minutes": 0
  },
  "weather": {
    // synthetic | replay | http
    "source": "synthetic",
    "replay_file": "",
    "mean_c": 3.0,
    "amplitude_c": 3.0,
    "day_jitter_c": 1.5,
    "noise_c": 0.2,
    "forecast_bias_c": 0.0,
    "forecast_noise_c": 0.0,
    "http": {
      "endpoint": "https://api.openweathermap.org/data/3.0/onecall?lat={lat}&lon={lon}&exclude=current,minutely,daily,alerts&appid={key}",
      "lat": 34.82,
      "lon": 135.52,
      "api_key_env": "OPENWEATHER_API_KEY",
      // Units of the document's temperatures: kelvin | celsius. Never guessed.
      "unit": "kelvin",
      "timeout_ms": 10000,
      "retries": 3,
      "backoff_ms": 500
    }
  },
  "lags": {
    // Lags 0, 1 and resolution * k for k = 1..depth, in steps.
    "resolution": 12,
    "depth": 8,
    "include_minus_one": true,
    "channels": ["T_in", "D", "T_out"]
  },
  "gp": {
    "population_size": 1000,
    "generations": 60,
    "tournament_size": 5,
    "crossover_prob": 0.7,
    "mutation_prob": 0.3,
    "max_complexity": 25,
    "parsimony": 1.05,
    "restarts": 5,
    // Fitness-evaluation threads; results are identical for any value.
    "workers": 1,
    "init_max_depth": 4,
    "elite": 5
  },
  "comfort": {
    "comfort_temp": 20.0,
    "lower": 18.0,
    "upper": 22.0,
    "occupied_window": "07:00-18:00",
    // Bounds outside the occupied window.
    "setback_lower": 5.0,
    "setback_upper": 35.0
  },
  "penalties": {
    "slack_penalty": 100.0,
    // Ramp weight inside the peak window (1 outside).
    "gamma_peak": 5.0,
    "peak_window": "05:00-10:00"
  },
  "mpc": {
    "horizon": 96,
    "mip_gap": 0.0001,
    "node_limit": 10000
  },
  "thermostat": {
    "setpoint": 20.0,
    "deadband": 0.5,
    "operating_window": "07:00-18:00"
  },
  "plant": {
    // 2R2C network: K/kW and kWh/K.
    "r_ia": 3.0,
    "r_im": 1.0,
    "c_i": 3.0,
    "c_m": 15.0,
    "initial_t_i": 18.0,
    "initial_t_m": 18.0,
    // Internal gains apply in the occupied window.
    "internal_gain_kw": 0.4,
    "solar_peak_kw": 0.8,
    "daylight_window": "07:00-17:00"
  },
  "hvac": {
    // Catalog CSV t_out_c,capacity_kw,power_kw. Empty: sample the built-in synthetic unit.
    "catalog": "",
    "fit_segments": 2,
    "samples_per_level": 60,
    "noise_kw": 0.02
  },
  "output": {
    // Adds wall-clock columns to solver statistics (breaks byte-identical reruns).
    "include_timing": false
  }
}
)";
}

std::string config_hash(const RunConfig& c) {
  const std::string text = to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t weather_seed(const RunConfig& c) { return c.seed; }
std::uint64_t excitation_seed(const RunConfig& c) { return c.seed + 1; }
std::uint64_t gp_seed(const RunConfig& c) { return c.seed + 2; }
std::uint64_t hvac_fit_seed(const RunConfig& c) { return c.seed + 3; }
std::uint64_t forecast_seed(const RunConfig& c) { return c.seed + 4; }

}  // namespace hvacsr::app
