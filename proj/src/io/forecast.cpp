#include "hvacsr/io/forecast.hpp"

#include <random>

#include "hvacsr/core/error.hpp"

namespace hvacsr::io {

FileReplayProvider::FileReplayProvider(SeriesFrame frame, ForecastErrorModel error)
    : frame_(std::move(frame)), error_(error) {
  if (!frame_.has_channel(channel::kAmbientTemp)) throw DataError("replay frame has no T_out channel");
  if (!(error_.noise_std >= 0.0)) throw ConfigError("forecast noise std must be non-negative");
}

Eigen::VectorXd FileReplayProvider::get_forecast(Timestamp from, int horizon) {
  if (horizon < 1) throw DataError("forecast horizon must be positive");
  const auto first = frame_.grid().index_of(from);
  if (!first) throw DataError("replay has no sample at " + format_iso8601(from));
  const auto n = static_cast<std::size_t>(horizon);
  if (*first + n > frame_.length()) {
    throw DataError("replay gap: forecast from " + format_iso8601(from) + " runs past " +
                    format_iso8601(frame_.grid().end()));
  }
  Eigen::VectorXd out(horizon);
  for (std::size_t k = 0; k < n; ++k) {
    if (frame_.is_missing(channel::kAmbientTemp, *first + k)) {
      throw DataError("replay gap: T_out missing at " + format_iso8601(frame_.grid().at(*first + k)));
    }
    out[static_cast<Eigen::Index>(k)] = frame_.at(channel::kAmbientTemp, *first + k);
  }
  if (error_.is_zero()) return out;
  out.array() += error_.bias;
  if (error_.noise_std > 0.0) {
    const auto issue = static_cast<std::uint64_t>(from.time_since_epoch().count());
    std::seed_seq seq{static_cast<std::uint32_t>(error_.seed), static_cast<std::uint32_t>(error_.seed >> 32),
                      static_cast<std::uint32_t>(issue), static_cast<std::uint32_t>(issue >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> noise(0.0, error_.noise_std);
    for (Eigen::Index k = 0; k < out.size(); ++k) out[k] += noise(rng);
  }
  return out;
}

}  // namespace hvacsr::io
