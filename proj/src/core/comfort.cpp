#include "hvacsr/core/comfort.hpp"

#include "hvacsr/core/error.hpp"

namespace hvacsr {

void ComfortSpec::validate() const {
  if (!(lower <= comfort_temp && comfort_temp <= upper)) {
    throw ConfigError("comfort band requires lower <= comfort_temp <= upper");
  }
  if (!(setback_lower <= setback_upper)) throw ConfigError("setback band requires setback_lower <= setback_upper");
}

ComfortSpec ComfortSpec::with_setback(double comfort, double lo, double hi, DailyWindow window,
                                      double setback_lo, double setback_hi) {
  ComfortSpec c;
  c.comfort_temp = comfort;
  c.lower = lo;
  c.upper = hi;
  c.occupied_window = window;
  c.setback_lower = setback_lo;
  c.setback_upper = setback_hi;
  c.validate();
  return c;
}

}  // namespace hvacsr
