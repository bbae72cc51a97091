#include "stopsim/control.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stopsim {
namespace {

constexpr double kMinStopDistance = 1e-3;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void ValidateInner(const InnerController& inner) {
  std::visit(
      Overloaded{
          [](const ThresholdConstant& c) {
            if (!(c.b_const > 0.0 && c.b_const <= 1.0)) {
              throw ValidationError("b_const", "must lie in (0, 1]");
            }
          },
          [](const AdjustedBraking& c) {
            if (!(c.a_max > 0.0)) {
              throw ValidationError("a_max", "must be positive");
            }
            if (!(c.multiplier >= c.multiplier_min &&
                  c.multiplier <= c.multiplier_max && c.multiplier > 0.0)) {
              throw ValidationError("brake_multiplier",
                                    "must lie within [multiplier_min, "
                                    "multiplier_max] and be positive");
            }
            if (!(c.standoff >= 0.0)) {
              throw ValidationError("standoff", "must be non-negative");
            }
          }},
      inner);
}

const char* InnerName(const InnerController& inner) {
  return std::holds_alternative<ThresholdConstant>(inner) ? "ThresholdConstant"
                                                          : "AdjustedBraking";
}

double StepThreshold(const ThresholdConstant& c, ControllerState& state,
                     const Observation& front) {
  if (front.detected) state.brake_latched = true;
  return state.brake_latched ? c.b_const : 0.0;
}

double StepAdjusted(const AdjustedBraking& c, ControllerState& state,
                    const ControlInput& input, std::optional<double>& est) {
  const Observation& front = input.front;
  if (front.detected && front.h_bbox) {
    est = EstimateDistance(input.camera, *front.h_bbox, input.sign_height);
    const bool recompute =
        c.update == UpdatePolicy::kEveryDetection || !state.seen_front;
    if (recompute) {
      const double d_stop = std::max(*est - c.standoff, kMinStopDistance);
      state.held_b = BrakeMessage(RequiredDeceleration(input.vehicle.v, d_stop),
                                  c.a_max, c.multiplier);
    }
    state.seen_front = true;
  }
  return state.held_b;
}

double StepInner(const InnerController& inner, ControllerState& state,
                 const ControlInput& input, std::optional<double>& est) {
  return std::visit(
      Overloaded{[&](const ThresholdConstant& c) {
                   if (input.front.detected && input.front.h_bbox) {
                     est = EstimateDistance(input.camera, *input.front.h_bbox,
                                            input.sign_height);
                   }
                   return StepThreshold(c, state, input.front);
                 },
                 [&](const AdjustedBraking& c) {
                   return StepAdjusted(c, state, input, est);
                 }},
      inner);
}

}  // namespace

void ValidateController(const ControllerKind& kind) {
  std::visit(Overloaded{[](const ThresholdConstant& c) { ValidateInner(c); },
                        [](const AdjustedBraking& c) { ValidateInner(c); },
                        [](const SideCameraFusion& c) { ValidateInner(c.inner); }},
             kind);
}

bool NeedsSideCamera(const ControllerKind& kind) {
  return std::holds_alternative<SideCameraFusion>(kind);
}

std::string ControllerName(const ControllerKind& kind) {
  return std::visit(
      Overloaded{[](const ThresholdConstant&) -> std::string {
                   return "ThresholdConstant";
                 },
                 [](const AdjustedBraking&) -> std::string {
                   return "AdjustedBraking";
                 },
                 [](const SideCameraFusion& c) -> std::string {
                   return std::string("SideCameraFusion(") +
                          InnerName(c.inner) + ")";
                 }},
      kind);
}

double RequiredDeceleration(double v, double d_stop) {
  if (!(d_stop > 0.0)) return std::numeric_limits<double>::infinity();
  return v * v / (2.0 * d_stop);
}

double BrakeMessage(double a, double a_max, double multiplier) {
  if (!(a_max > 0.0)) throw DomainError("a_max must be positive");
  if (std::isnan(a)) return 1.0;
  return std::clamp(a / a_max * multiplier, 0.0, 1.0);
}

double CruiseThrottle(double v, double v_target, double k_p,
                      double max_throttle_accel, bool braking) {
  if (braking) return 0.0;
  return std::clamp(k_p * (v_target - v), 0.0, max_throttle_accel);
}

ControlOutput StepController(const ControllerKind& kind, ControllerState& state,
                             const ControlInput& input) {
  ControlOutput out;
  out.inner_b = std::visit(
      Overloaded{[&](const ThresholdConstant& c) {
                   return StepInner(c, state, input, out.est_distance);
                 },
                 [&](const AdjustedBraking& c) {
                   return StepInner(c, state, input, out.est_distance);
                 },
                 [&](const SideCameraFusion& c) {
                   return StepInner(c.inner, state, input, out.est_distance);
                 }},
      kind);
  out.b = out.inner_b;
  if (std::holds_alternative<SideCameraFusion>(kind)) {
    if (input.side == nullptr) {
      throw ValidationError("side_camera",
                            "SideCameraFusion requires a side observation");
    }
    if (input.side->detected) out.b = 1.0;
  }
  if (out.b > 0.0 && !state.brake_onset_t) {
    state.brake_onset_t = input.vehicle.t;
    state.brake_onset_distance = input.distance_to_sign;
  }
  return out;
}

}  // namespace stopsim
