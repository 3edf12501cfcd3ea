#include "hvacsr/core/error.hpp"

namespace hvacsr {

const char* error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Data: return "data";
    case ErrorKind::Solver: return "solver";
  }
  return "unknown";
}

}  // namespace hvacsr
