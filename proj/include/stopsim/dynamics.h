#pragma once

#include "stopsim/world.h"

namespace stopsim {

struct DynamicsConfig {
  double dt = 0.01;            // fixed step, seconds
  double brake_decel = 9.81;   // deceleration at b = 1, m/s^2
  double stop_epsilon = 0.05;  // snap-to-zero speed while braking, m/s
};

void ValidateDynamics(const DynamicsConfig& cfg);

// One semi-implicit Euler step: speed first, then position with the new
// speed. Speed never goes negative.
VehicleState StepDynamics(const VehicleState& state, double b,
                          double throttle_accel, const DynamicsConfig& cfg);

// v0^2 / (2 a).
double AnalyticBrakingDistance(double v0, double a);

}  // namespace stopsim
