#pragma once

#include <limits>

#include "hvacsr/core/time.hpp"

namespace hvacsr {

/// Comfort band during the occupied window. Outside it the setback band applies; the
/// default setback only guards against frost and overheating.
struct ComfortSpec {
  double comfort_temp = 20.0;
  double lower = 18.0;
  double upper = 22.0;
  DailyWindow occupied_window = DailyWindow::hours(7, 18);
  double setback_lower = 5.0;
  double setback_upper = 35.0;
  Seconds utc_offset{0};

  void validate() const;
  bool occupied(Timestamp ts) const { return occupied_window.contains(ts, utc_offset); }
  double lower_at(Timestamp ts) const { return occupied(ts) ? lower : setback_lower; }
  double upper_at(Timestamp ts) const { return occupied(ts) ? upper : setback_upper; }

  static ComfortSpec with_setback(double comfort, double lower, double upper, DailyWindow window,
                                  double setback_lower, double setback_upper);
};

}  // namespace hvacsr
