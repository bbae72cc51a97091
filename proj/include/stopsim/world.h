#pragma once

#include "stopsim/errors.h"

namespace stopsim {

// All internal quantities are SI. km/h only appears at config/report edges.
double KmhToMs(double speed_kmh);
double MsToKmh(double speed_ms);
double DegToRad(double degrees);

// Static 1-D scene: the ego lane is an arc-length axis, the sign sits at
// s_sign with a perpendicular offset from lane center.
struct Scene {
  double s_start = 0.0;
  double s_sign = 350.0;
  double lateral_offset = 2.0;
  double sign_height = 0.75;  // physical height of the sign face, meters
  double stop_line_offset = 0.0;
};

// Unvalidated scene fields as read from configuration.
using SceneParams = Scene;

// Throws ValidationError naming the first field that breaks an invariant.
Scene BuildScene(const SceneParams& params);

enum class Phase { kAccelerating, kCruising, kBraking, kStopped };

const char* PhaseName(Phase phase);

struct VehicleState {
  double t = 0.0;
  double s = 0.0;
  double v = 0.0;
  double b = 0.0;
  Phase phase = Phase::kAccelerating;
};

}  // namespace stopsim
