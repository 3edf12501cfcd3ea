#include "hvacsr/io/weather.hpp"

#include <cmath>
#include <cstdlib>
#include <json.hpp>
#include <thread>

#include "hvacsr/core/error.hpp"

namespace hvacsr::io {

TemperatureUnit parse_unit(std::string_view text) {
  if (text == "celsius" || text == "C") return TemperatureUnit::Celsius;
  if (text == "kelvin" || text == "K") return TemperatureUnit::Kelvin;
  throw ConfigError("unknown temperature unit '" + std::string(text) + "' (expected celsius or kelvin)");
}

SeriesFrame parse_weather_json(std::string_view document, TemperatureUnit unit, Seconds step) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("weather document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("hourly") || !doc["hourly"].is_array()) {
    throw DataError("weather document: missing 'hourly' array");
  }
  std::vector<std::pair<std::int64_t, double>> pts;
  for (const auto& h : doc["hourly"]) {
    if (!h.is_object() || !h.contains("dt") || !h.contains("temp") || !h["dt"].is_number_integer() ||
        !h["temp"].is_number()) {
      throw DataError("weather document: hourly entry " + std::to_string(pts.size()) + " lacks numeric dt/temp");
    }
    double v = h["temp"].get<double>();
    if (unit == TemperatureUnit::Kelvin) v -= 273.15;
    const auto dt = h["dt"].get<std::int64_t>();
    if (!pts.empty() && dt <= pts.back().first) {
      throw DataError("weather document: non-monotone dt at entry " + std::to_string(pts.size()));
    }
    pts.emplace_back(dt, v);
  }
  if (pts.empty()) throw DataError("weather document: empty hourly list");
  if ((pts.back().first - pts.front().first) % step.count() != 0) {
    throw DataError("weather document: sample times are not aligned with the grid step");
  }
  const auto n = static_cast<std::size_t>((pts.back().first - pts.front().first) / step.count()) + 1;
  Eigen::VectorXd t(static_cast<Eigen::Index>(n));
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::int64_t ts = pts.front().first + static_cast<std::int64_t>(k) * step.count();
    while (seg + 1 < pts.size() && pts[seg + 1].first < ts) ++seg;
    if (seg + 1 == pts.size()) {
      t[static_cast<Eigen::Index>(k)] = pts[seg].second;
      continue;
    }
    const auto [t0, v0] = pts[seg];
    const auto [t1, v1] = pts[seg + 1];
    const double w = static_cast<double>(ts - t0) / static_cast<double>(t1 - t0);
    t[static_cast<Eigen::Index>(k)] = ts == t1 ? v1 : v0 + w * (v1 - v0);
  }
  SeriesFrame f(TimeGrid(Timestamp{Seconds{pts.front().first}}, step, n));
  f.set_channel(channel::kAmbientTemp, std::move(t));
  return f;
}

void WeatherHttpConfig::validate() const {
  if (timeout.count() <= 0) throw ConfigError("weather timeout must be positive");
  if (retries < 0) throw ConfigError("weather retries must be non-negative");
  if (backoff.count() < 0) throw ConfigError("weather backoff must be non-negative");
  if (endpoint.rfind("http://", 0) != 0 && endpoint.rfind("https://", 0) != 0) {
    throw ConfigError("weather endpoint must be an http(s) URL");
  }
}

std::string WeatherHttpConfig::url(const std::string& api_key) const {
  std::string out = endpoint;
  const auto sub = [&out](const std::string& key, const std::string& value) {
    for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size())) {
      out.replace(pos, key.size(), value);
    }
  };
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", lat);
  sub("{lat}", buf);
  std::snprintf(buf, sizeof buf, "%.4f", lon);
  sub("{lon}", buf);
  sub("{key}", api_key);
  return out;
}

HttpForecastProvider::HttpForecastProvider(WeatherHttpConfig config, std::unique_ptr<HttpClient> client,
                                           Sleeper sleeper)
    : config_(std::move(config)), client_(std::move(client)), sleep_(std::move(sleeper)) {
  config_.validate();
  if (!client_) throw ConfigError("weather provider needs an HTTP client");
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

Eigen::VectorXd HttpForecastProvider::get_forecast(Timestamp from, int horizon) {
  std::lock_guard lock(mutex_);
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr) throw ConfigError("environment variable " + config_.api_key_env + " is not set");
  const std::string url = config_.url(key);

  HttpResponse resp;
  auto wait = config_.backoff;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) {
      sleep_(wait);
      wait *= 2;
    }
    ++attempts_;
    resp = client_->get(url, config_.timeout);
    if (resp.status == 200) break;
  }
  if (resp.status != 200) {
    throw HttpForecastError(resp.status, "weather request failed after " + std::to_string(config_.retries + 1) +
                                             " attempts (last status " + std::to_string(resp.status) + ")");
  }
  const SeriesFrame frame = parse_weather_json(resp.body, config_.unit);
  const auto first = frame.grid().index_of(from);
  if (!first || *first + static_cast<std::size_t>(horizon) > frame.length()) {
    throw DataError("weather forecast does not cover " + std::to_string(horizon) + " steps from " +
                    format_iso8601(from));
  }
  return frame.values(channel::kAmbientTemp).segment(static_cast<Eigen::Index>(*first), horizon);
}

}  // namespace hvacsr::io
