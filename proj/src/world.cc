#include "stopsim/world.h"

#include <cmath>
#include <numbers>

namespace stopsim {

double KmhToMs(double speed_kmh) {
  if (!(speed_kmh >= 0.0)) {
    throw DomainError("speed must be non-negative");
  }
  return speed_kmh / 3.6;
}

double MsToKmh(double speed_ms) {
  if (!(speed_ms >= 0.0)) {
    throw DomainError("speed must be non-negative");
  }
  return speed_ms * 3.6;
}

double DegToRad(double degrees) { return degrees * std::numbers::pi / 180.0; }

Scene BuildScene(const SceneParams& params) {
  auto finite = [](const char* field, double value) {
    if (!std::isfinite(value)) {
      throw ValidationError(field, "must be a finite number");
    }
  };
  finite("s_start", params.s_start);
  finite("s_sign", params.s_sign);
  finite("lateral_offset", params.lateral_offset);
  finite("sign_height", params.sign_height);
  finite("stop_line_offset", params.stop_line_offset);

  if (params.s_sign <= params.s_start) {
    throw ValidationError("s_sign", "must lie ahead of s_start");
  }
  if (params.sign_height <= 0.0) {
    throw ValidationError("sign_height", "must be positive");
  }
  if (params.lateral_offset < 0.0) {
    throw ValidationError("lateral_offset", "must be non-negative");
  }
  if (params.stop_line_offset < 0.0) {
    throw ValidationError("stop_line_offset", "must be non-negative");
  }
  return params;
}

const char* PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kAccelerating:
      return "Accelerating";
    case Phase::kCruising:
      return "Cruising";
    case Phase::kBraking:
      return "Braking";
    case Phase::kStopped:
      return "Stopped";
  }
  return "?";
}

}  // namespace stopsim
