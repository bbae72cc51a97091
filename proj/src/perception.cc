#include "stopsim/perception.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace stopsim {

CameraSpec DefaultFrontCamera() { return CameraSpec{}; }

CameraSpec DefaultSideCamera() {
  CameraSpec camera;
  camera.facing = Facing::kSide;
  camera.max_range = camera.side_trigger_range;
  return camera;
}

void ValidateCamera(const CameraSpec& camera) {
  if (!(camera.fov_deg > 0.0 && camera.fov_deg < 180.0)) {
    throw ValidationError("fov",
                          "must lie in (0, 180) degrees (focal length domain)");
  }
  if (camera.image_height < 1) {
    throw ValidationError("image_height", "must be at least 1 pixel");
  }
  if (camera.image_width < 1) {
    throw ValidationError("image_width", "must be at least 1 pixel");
  }
  if (!(camera.max_range > 0.0) || !std::isfinite(camera.max_range)) {
    throw ValidationError("max_range", "must be positive");
  }
  if (!(camera.side_trigger_range > 0.0) ||
      !std::isfinite(camera.side_trigger_range)) {
    throw ValidationError("trigger_range", "must be positive");
  }
}

AttackProfile DefaultAttackProfile(AttackKind kind) {
  switch (kind) {
    case AttackKind::kNone:
      return {kind, 1.0, 1.0};
    case AttackKind::kChen:
      return {kind, 0.8, 1.0};
    case AttackKind::kEykholt:
      return {kind, 0.75, 1.0};
    case AttackKind::kLuV2:
      // range_scale as produced by `calibrate --target 10.3` on the
      // default scenario.
      return {kind, 0.55, 0.736};
    case AttackKind::kLuV3:
      return {kind, 0.65, 1.0};
    case AttackKind::kYang:
      return {kind, 0.7, 1.0};
    case AttackKind::kCustom:
      return {kind, 1.0, 1.0};
  }
  return {};
}

std::optional<AttackKind> ParseAttackKind(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c == '-' || c == '_' || c == ' ') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "none") return AttackKind::kNone;
  if (key == "chen") return AttackKind::kChen;
  if (key == "eykholt") return AttackKind::kEykholt;
  if (key == "luv2") return AttackKind::kLuV2;
  if (key == "luv3") return AttackKind::kLuV3;
  if (key == "yang") return AttackKind::kYang;
  if (key == "custom") return AttackKind::kCustom;
  return std::nullopt;
}

const char* AttackName(AttackKind kind) {
  switch (kind) {
    case AttackKind::kNone:
      return "None";
    case AttackKind::kChen:
      return "Chen";
    case AttackKind::kEykholt:
      return "Eykholt";
    case AttackKind::kLuV2:
      return "LuV2";
    case AttackKind::kLuV3:
      return "LuV3";
    case AttackKind::kYang:
      return "Yang";
    case AttackKind::kCustom:
      return "Custom";
  }
  return "?";
}

void ValidateAttackProfile(const AttackProfile& profile) {
  if (!(profile.confidence_scale >= 0.0 && profile.confidence_scale <= 1.0)) {
    throw ValidationError("confidence_scale", "must lie in [0, 1]");
  }
  if (!(profile.range_scale > 0.0 && profile.range_scale <= 1.0)) {
    throw ValidationError("range_scale", "must lie in (0, 1]");
  }
  if (profile.kind == AttackKind::kNone &&
      (profile.confidence_scale != 1.0 || profile.range_scale != 1.0)) {
    throw ValidationError("attack",
                          "None profile must have unit confidence and range "
                          "scales");
  }
}

double FocalLength(const CameraSpec& camera) {
  if (!(camera.fov_deg > 0.0 && camera.fov_deg < 180.0)) {
    throw DomainError("field of view must lie in (0, 180) degrees");
  }
  return camera.image_height / (2.0 * std::tan(DegToRad(camera.fov_deg) / 2.0));
}

double ProjectBboxHeight(const CameraSpec& camera, double d,
                         double sign_height) {
  if (!(d > 0.0)) throw DomainError("distance must be positive");
  if (!(sign_height > 0.0)) throw DomainError("sign height must be positive");
  return sign_height * FocalLength(camera) / d;
}

double EstimateDistance(const CameraSpec& camera, double h_bbox,
                        double sign_height) {
  if (!(h_bbox > 0.0)) throw DomainError("bounding box height must be positive");
  return sign_height * FocalLength(camera) / h_bbox;
}

namespace {

// tan of the horizontal half-angle, from the vertical FOV and aspect ratio.
double HorizontalHalfTan(const CameraSpec& camera) {
  return std::tan(DegToRad(camera.fov_deg) / 2.0) * camera.image_width /
         camera.image_height;
}

}  // namespace

double ConfidenceAt(const CameraSpec& camera, const Scene& scene,
                    const AttackProfile& profile, const ConfidenceModel& model,
                    double d) {
  if (!(d > 0.0)) return 0.0;
  const double range = profile.range_scale * camera.max_range;
  if (std::hypot(d, scene.lateral_offset) > range) return 0.0;
  if (scene.lateral_offset > d * HorizontalHalfTan(camera)) return 0.0;
  const double base = model.c0 * std::min(1.0, model.d_ref / d);
  return std::clamp(profile.confidence_scale * base, 0.0, 1.0);
}

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t row) {
  // splitmix64 finalizer over the pair.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (row + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool SampleDetection(double confidence, DetectionMode mode, double threshold,
                     Rng& rng) {
  if (mode == DetectionMode::kDeterministic) return confidence >= threshold;
  return rng.Uniform() < confidence;
}

Observation ObserveFront(const CameraSpec& camera, const Scene& scene,
                         const AttackProfile& profile,
                         const PerceptionSettings& settings, double d,
                         double t, Rng& rng) {
  Observation obs;
  obs.t = t;
  obs.camera = Facing::kFront;
  obs.confidence = ConfidenceAt(camera, scene, profile, settings.model, d);
  const bool hit = SampleDetection(obs.confidence, settings.mode,
                                   settings.threshold, rng);
  if (!hit || obs.confidence <= 0.0) return obs;

  double h = ProjectBboxHeight(camera, d, scene.sign_height);
  if (settings.quantize_bbox) h = std::round(h);
  if (h <= 0.0) return obs;
  obs.detected = true;
  obs.h_bbox = h;
  return obs;
}

Observation ObserveSide(const CameraSpec& camera, const AttackProfile& profile,
                        const PerceptionSettings& settings, double d, double t,
                        Rng& rng) {
  Observation obs;
  obs.t = t;
  obs.camera = Facing::kSide;
  const bool in_view = d > 0.0 && d <= camera.side_trigger_range;
  obs.confidence =
      in_view ? std::clamp(profile.confidence_scale * settings.model.c0, 0.0, 1.0)
              : 0.0;
  const bool hit = SampleDetection(obs.confidence, settings.mode,
                                   settings.threshold, rng);
  obs.detected = hit && obs.confidence > 0.0;
  return obs;
}

}  // namespace stopsim
