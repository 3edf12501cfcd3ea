#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hvacsr {

using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

inline constexpr Seconds kDefaultStep{900};

/// Uniform time grid: index t <-> start + t * step.
class TimeGrid {
 public:
  TimeGrid(Timestamp start, Seconds step, std::size_t length);

  Timestamp start() const { return start_; }
  Seconds step() const { return step_; }
  std::size_t length() const { return length_; }
  double step_hours() const { return static_cast<double>(step_.count()) / 3600.0; }

  Timestamp at(std::size_t t) const { return start_ + step_ * static_cast<std::int64_t>(t); }
  Timestamp end() const { return at(length_); }
  std::optional<std::size_t> index_of(Timestamp ts) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  Timestamp start_;
  Seconds step_;
  std::size_t length_;
};

/// Daily time-of-day range [start, end) in minutes after local midnight.
/// A range with start > end wraps around midnight.
struct DailyWindow {
  int start_minute = 0;
  int end_minute = 0;

  static DailyWindow hours(double from, double to);
  static DailyWindow parse(std::string_view text);  // "HH:MM-HH:MM"

  bool contains_minute(int minute_of_day) const;
  bool contains(Timestamp ts, Seconds utc_offset = Seconds{0}) const;
  std::string to_string() const;

  friend bool operator==(const DailyWindow&, const DailyWindow&) = default;
};

int minute_of_day(Timestamp ts, Seconds utc_offset = Seconds{0});

std::string format_iso8601(Timestamp ts);
/// Accepts "YYYY-MM-DDTHH:MM[:SS]" with optional "Z" or "+00:00" suffix.
Timestamp parse_iso8601(std::string_view text);
Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour = 0, int minute = 0);

}  // namespace hvacsr
