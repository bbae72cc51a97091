#pragma once

#include <optional>
#include <string>
#include <variant>

#include "stopsim/perception.h"
#include "stopsim/world.h"

namespace stopsim {

// Baseline: latch a constant brake level on the first front detection.
struct ThresholdConstant {
  double b_const = 0.694;
};

enum class UpdatePolicy { kEveryDetection, kFirstDetection };

// Defense 1: brake level from estimated distance and current speed.
struct AdjustedBraking {
  double a_max = 9.81;       // reference maximum deceleration, m/s^2
  double multiplier = 1.0;   // brake multiplier M
  double standoff = 5.0;     // meters short of the sign to aim for
  UpdatePolicy update = UpdatePolicy::kEveryDetection;
  double multiplier_min = 0.6;
  double multiplier_max = 1.0;
};

using InnerController = std::variant<ThresholdConstant, AdjustedBraking>;

// Defense 2: full brake whenever the side camera sees the sign, on top of
// whatever the inner (front-camera) controller commands.
struct SideCameraFusion {
  InnerController inner;
};

using ControllerKind =
    std::variant<ThresholdConstant, AdjustedBraking, SideCameraFusion>;

void ValidateController(const ControllerKind& kind);
bool NeedsSideCamera(const ControllerKind& kind);
// "ThresholdConstant", "AdjustedBraking", "SideCameraFusion(AdjustedBraking)".
std::string ControllerName(const ControllerKind& kind);

struct ControllerState {
  bool brake_latched = false;
  bool seen_front = false;
  double held_b = 0.0;
  std::optional<double> brake_onset_t;
  std::optional<double> brake_onset_distance;
};

// v^2 / (2 d_stop). Non-positive d_stop yields +inf (full-brake saturation).
double RequiredDeceleration(double v, double d_stop);

// min((a / a_max) * M, 1), floored at 0.
double BrakeMessage(double a, double a_max, double multiplier);

double CruiseThrottle(double v, double v_target, double k_p,
                      double max_throttle_accel, bool braking);

struct ControlInput {
  const Observation& front;
  const Observation* side = nullptr;  // required for SideCameraFusion
  const VehicleState& vehicle;
  const CameraSpec& camera;
  double sign_height = 0.75;
  double distance_to_sign = 0.0;  // ground truth, only recorded at onset
};

struct ControlOutput {
  double b = 0.0;
  double inner_b = 0.0;  // pre-fusion command; equals b for non-fusion kinds
  std::optional<double> est_distance;
};

ControlOutput StepController(const ControllerKind& kind, ControllerState& state,
                             const ControlInput& input);

}  // namespace stopsim
