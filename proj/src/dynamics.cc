#include "stopsim/dynamics.h"

#include <algorithm>
#include <cmath>

namespace stopsim {

void ValidateDynamics(const DynamicsConfig& cfg) {
  if (!(cfg.dt > 0.0 && cfg.dt <= 0.1)) {
    throw ValidationError("dt", "must lie in (0, 0.1] seconds");
  }
  if (!(cfg.brake_decel > 0.0) || !std::isfinite(cfg.brake_decel)) {
    throw ValidationError("brake_decel", "must be positive");
  }
  if (!(cfg.stop_epsilon >= 0.0)) {
    throw ValidationError("stop_epsilon", "must be non-negative");
  }
}

VehicleState StepDynamics(const VehicleState& state, double b,
                          double throttle_accel, const DynamicsConfig& cfg) {
  const bool braking = b > 0.0;
  const double a_net = throttle_accel - b * cfg.brake_decel;

  VehicleState next = state;
  next.b = b;
  next.v = std::max(state.v + a_net * cfg.dt, 0.0);
  if (braking && next.v < cfg.stop_epsilon) next.v = 0.0;
  next.s = state.s + next.v * cfg.dt;
  next.t = state.t + cfg.dt;

  if (braking) {
    next.phase = next.v == 0.0 ? Phase::kStopped : Phase::kBraking;
  } else if (state.phase == Phase::kStopped && throttle_accel <= 0.0) {
    next.phase = Phase::kStopped;
  } else {
    next.phase = throttle_accel > 0.0 ? Phase::kAccelerating : Phase::kCruising;
  }
  return next;
}

double AnalyticBrakingDistance(double v0, double a) {
  if (!(a > 0.0)) throw DomainError("deceleration must be positive");
  if (!(v0 >= 0.0)) throw DomainError("speed must be non-negative");
  return v0 * v0 / (2.0 * a);
}

}  // namespace stopsim
