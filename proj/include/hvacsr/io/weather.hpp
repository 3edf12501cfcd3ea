#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "hvacsr/core/error.hpp"
#include "hvacsr/io/forecast.hpp"

namespace hvacsr::io {

enum class TemperatureUnit { Celsius, Kelvin };
TemperatureUnit parse_unit(std::string_view text);

/// Hourly document: {"hourly": [{"dt": <unix seconds>, "temp": <value>}, ...]}. Values are
/// converted from `unit` and linearly interpolated onto `step`; the result spans exactly the
/// first to the last hourly sample.
SeriesFrame parse_weather_json(std::string_view document, TemperatureUnit unit, Seconds step = kDefaultStep);

struct WeatherHttpConfig {
  // {lat}, {lon} and {key} are substituted.
  std::string endpoint =
      "https://api.openweathermap.org/data/3.0/onecall?lat={lat}&lon={lon}&exclude=current,minutely,daily,alerts&appid={key}";
  double lat = 34.82;
  double lon = 135.52;
  std::string api_key_env = "OPENWEATHER_API_KEY";
  TemperatureUnit unit = TemperatureUnit::Kelvin;
  std::chrono::milliseconds timeout{10000};
  int retries = 3;
  std::chrono::milliseconds backoff{500};  // doubled after each failed attempt

  void validate() const;
  std::string url(const std::string& api_key) const;
};

struct HttpResponse {
  int status = 0;  // 0 for transport failures
  std::string body;
};

class HttpClient {
 public:
  virtual ~HttpClient() = default;
  virtual HttpResponse get(const std::string& url, std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib backed client (HTTPS via OpenSSL).
std::unique_ptr<HttpClient> make_default_http_client();

/// Error raised after the last retry; carries the final HTTP status (0 = transport failure).
class HttpForecastError : public DataError {
 public:
  HttpForecastError(int status, const std::string& msg) : DataError(msg), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

/// Fetches the hourly document once per call and slices it to the requested window.
/// Requests are serialized per instance.
class HttpForecastProvider : public ForecastProvider {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  /// The API key is read from the configured environment variable on every request.
  HttpForecastProvider(WeatherHttpConfig config, std::unique_ptr<HttpClient> client, Sleeper sleeper = {});

  Eigen::VectorXd get_forecast(Timestamp from, int horizon) override;
  int attempts() const { return attempts_; }

 private:
  WeatherHttpConfig config_;
  std::unique_ptr<HttpClient> client_;
  Sleeper sleep_;
  std::mutex mutex_;
  int attempts_ = 0;
};

}  // namespace hvacsr::io
