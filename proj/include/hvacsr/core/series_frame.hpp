#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "hvacsr/core/time.hpp"

namespace hvacsr {

namespace channel {
inline constexpr std::string_view kRoomTemp = "T_in";
inline constexpr std::string_view kAmbientTemp = "T_out";
inline constexpr std::string_view kPower = "D";
inline constexpr std::string_view kCapacity = "Q";
inline constexpr std::string_view kOccupancy = "occ";
inline constexpr std::string_view kSetpoint = "setpoint";
}  // namespace channel

/// Aligned multi-channel series on a uniform grid. Masked samples hold NaN.
class SeriesFrame {
 public:
  explicit SeriesFrame(TimeGrid grid);

  const TimeGrid& grid() const { return grid_; }
  std::size_t length() const { return grid_.length(); }

  /// Inserts or replaces a channel. NaN entries in `values` are masked as well.
  void set_channel(std::string_view name, Eigen::VectorXd values, std::vector<bool> missing = {});

  bool has_channel(std::string_view name) const;
  const std::vector<std::string>& channel_names() const { return names_; }
  const Eigen::VectorXd& values(std::string_view name) const;
  const std::vector<bool>& missing(std::string_view name) const;
  bool is_missing(std::string_view name, std::size_t t) const { return missing(name)[t]; }
  double at(std::string_view name, std::size_t t) const { return values(name)[static_cast<Eigen::Index>(t)]; }

  /// Rows [first, first + count) as a new frame on the matching sub-grid.
  SeriesFrame slice(std::size_t first, std::size_t count) const;

  friend bool operator==(const SeriesFrame& a, const SeriesFrame& b);

 private:
  std::size_t index_of(std::string_view name) const;

  TimeGrid grid_;
  std::vector<std::string> names_;
  std::vector<Eigen::VectorXd> values_;
  std::vector<std::vector<bool>> missing_;
};

/// Down-samples onto a coarser grid aligned with the input start. Continuous channels
/// average their non-masked samples, occupancy takes the max. A trailing partial
/// window is aggregated over the samples it covers.
SeriesFrame resample(const SeriesFrame& frame, Seconds new_step);

}  // namespace hvacsr
