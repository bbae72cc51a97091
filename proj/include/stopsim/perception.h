#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "stopsim/world.h"

namespace stopsim {

enum class Facing { kFront, kSide };

struct CameraSpec {
  int image_height = 600;         // pixels
  int image_width = 800;          // pixels, only used for the horizontal view
  double fov_deg = 90.0;          // vertical field of view
  Facing facing = Facing::kFront;
  double max_range = 42.0;        // geometric visibility cutoff, meters
  double side_trigger_range = 31.5;
};

CameraSpec DefaultFrontCamera();
CameraSpec DefaultSideCamera();

// Throws ValidationError on a broken CameraSpec invariant.
void ValidateCamera(const CameraSpec& camera);

enum class AttackKind { kNone, kChen, kEykholt, kLuV2, kLuV3, kYang, kCustom };

struct AttackProfile {
  AttackKind kind = AttackKind::kNone;
  double confidence_scale = 1.0;
  double range_scale = 1.0;
};

// Built-in degradation for each named attack; LuV2 is the strongest.
AttackProfile DefaultAttackProfile(AttackKind kind);
// Case-insensitive; accepts "LuV2", "lu-v2", "lu_v2".
std::optional<AttackKind> ParseAttackKind(std::string_view name);
const char* AttackName(AttackKind kind);
void ValidateAttackProfile(const AttackProfile& profile);

// Distance-decaying baseline confidence: c0 * min(1, d_ref / d).
struct ConfidenceModel {
  double c0 = 0.75;
  double d_ref = 20.0;
};

enum class DetectionMode { kDeterministic, kStochastic };

struct Observation {
  double t = 0.0;
  bool detected = false;
  double confidence = 0.0;
  std::optional<double> h_bbox;
  Facing camera = Facing::kFront;
};

// Pinhole focal length in pixels from the vertical field of view.
double FocalLength(const CameraSpec& camera);

// Synthesizes the bounding-box height a sign of `sign_height` at depth `d`
// would produce. Inverse of EstimateDistance.
double ProjectBboxHeight(const CameraSpec& camera, double d,
                         double sign_height);

double EstimateDistance(const CameraSpec& camera, double h_bbox,
                        double sign_height);

// Per-frame detector confidence for a sign `d` meters ahead along the lane.
// Zero outside the (attack-shrunk) visibility range or the horizontal view.
double ConfidenceAt(const CameraSpec& camera, const Scene& scene,
                    const AttackProfile& profile, const ConfidenceModel& model,
                    double d);

// Seedable generator. All stochastic draws in a run go through one instance.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) from the top 53 bits.
  double Uniform();

 private:
  std::mt19937_64 engine_;
};

// Per-row stream seed; row 0 is what a single `run` uses.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t row);

// Deterministic: confidence >= threshold, no draw. Stochastic: one Bernoulli
// draw with p = confidence, threshold ignored.
bool SampleDetection(double confidence, DetectionMode mode, double threshold,
                     Rng& rng);

struct PerceptionSettings {
  ConfidenceModel model;
  DetectionMode mode = DetectionMode::kDeterministic;
  double threshold = 0.25;
  bool quantize_bbox = false;
};

Observation ObserveFront(const CameraSpec& camera, const Scene& scene,
                         const AttackProfile& profile,
                         const PerceptionSettings& settings, double d,
                         double t, Rng& rng);

// The side camera is modeled behaviorally: it sees the sign once it is within
// side_trigger_range, with the attack's confidence_scale applied to c0.
Observation ObserveSide(const CameraSpec& camera, const AttackProfile& profile,
                        const PerceptionSettings& settings, double d, double t,
                        Rng& rng);

}  // namespace stopsim
