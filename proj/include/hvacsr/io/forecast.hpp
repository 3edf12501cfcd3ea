#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "hvacsr/core/series_frame.hpp"

namespace hvacsr::io {

/// Ambient temperature forecasts on the experiment grid.
class ForecastProvider {
 public:
  virtual ~ForecastProvider() = default;
  /// Exactly `horizon` values for steps from, from + step, ...
  virtual Eigen::VectorXd get_forecast(Timestamp from, int horizon) = 0;
};

struct ForecastErrorModel {
  double bias = 0.0;       // degC
  double noise_std = 0.0;  // degC
  std::uint64_t seed = 0;

  bool is_zero() const { return bias == 0.0 && noise_std == 0.0; }
};

/// Replays the T_out channel of a recorded frame. Noise depends only on the seed and the
/// issue time, so forecasts are reproducible regardless of call order.
class FileReplayProvider : public ForecastProvider {
 public:
  explicit FileReplayProvider(SeriesFrame frame, ForecastErrorModel error = {});

  Eigen::VectorXd get_forecast(Timestamp from, int horizon) override;
  const SeriesFrame& frame() const { return frame_; }

 private:
  SeriesFrame frame_;
  ForecastErrorModel error_;
};

}  // namespace hvacsr::io
