#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stopsim/control.h"
#include "stopsim/dynamics.h"
#include "stopsim/perception.h"
#include "stopsim/world.h"

namespace stopsim {

enum class PresetKind {
  kTown07Standard,
  kTown03Far,
  kTown03Near,
  kTown10Far,
  kTown10Near,
};

struct PlacementPreset {
  PresetKind kind = PresetKind::kTown07Standard;
  double lateral_offset = 2.0;
  double visibility_modifier = 1.0;  // scale on front-camera max_range
};

PlacementPreset DefaultPlacement(PresetKind kind);
const std::vector<PresetKind>& AllPresets();
const char* PresetName(PresetKind kind);
std::optional<PresetKind> ParsePresetKind(std::string_view name);

struct CruiseConfig {
  double k_p = 1.0;             // 1/s
  double max_throttle_accel = 3.0;
};

// Parameter sets for every controller kind, so a sweep can switch kinds
// without losing configured values.
struct ControllerParams {
  ThresholdConstant threshold;
  AdjustedBraking adjusted;
};

struct ScenarioConfig {
  PresetKind preset = PresetKind::kTown07Standard;
  Scene scene;
  double visibility_modifier = 1.0;
  CameraSpec front_camera = DefaultFrontCamera();
  std::optional<CameraSpec> side_camera = DefaultSideCamera();
  AttackProfile attack;
  ControllerKind controller = ThresholdConstant{};
  ControllerParams controller_params;
  double v_target = 85.0 / 3.6;
  PerceptionSettings perception;
  std::uint64_t seed = 42;
  DynamicsConfig dynamics;
  CruiseConfig cruise;
  double max_sim_time = 60.0;
};

// Defaults with the given preset's placement applied.
ScenarioConfig DefaultScenarioConfig(
    PresetKind preset = PresetKind::kTown07Standard);

void ApplyPreset(ScenarioConfig& config, PresetKind kind);

// Throws ValidationError naming the offending field.
void ValidateScenario(const ScenarioConfig& config);

// Front camera as seen by the scenario: max_range scaled by the placement.
CameraSpec EffectiveFrontCamera(const ScenarioConfig& config);

struct TraceSample {
  double t = 0.0;
  double s = 0.0;
  double v = 0.0;
  double b = 0.0;
  bool detected_front = false;
  bool detected_side = false;
  double confidence = 0.0;
  std::optional<double> est_distance;

  bool operator==(const TraceSample&) const = default;
};

using Trace = std::vector<TraceSample>;

struct TraceMetrics {
  double stop_position = 0.0;
  double overshoot = 0.0;
  double margin = 0.0;
  std::optional<double> time_to_complete_stop;
  std::optional<double> distance_at_brake;
  std::optional<double> brake_onset_t;
  bool stopped = false;
};

// Throws ValidationError on an empty trace or non-monotone time.
TraceMetrics MetricsFromTrace(const Trace& trace, const Scene& scene);

struct ScenarioResult {
  TraceMetrics metrics;
  Trace trace;
};

// `stream` selects the random stream; a sweep passes its row index.
ScenarioResult RunScenario(const ScenarioConfig& config,
                           std::uint64_t stream = 0);

struct GridSpec {
  std::vector<PresetKind> presets;
  std::vector<std::string> attacks;      // names, resolved per row
  std::vector<std::string> controllers;  // names, resolved per row
};

struct SweepCell {
  std::string preset;
  std::string attack;
  std::string controller;
  std::optional<ScenarioConfig> config;
  std::string error;  // set when the cell could not be configured
};

// Builds a controller from a name. Accepts threshold, adjusted,
// side_fusion (= fusion over threshold), combined (= fusion over adjusted),
// and the canonical ControllerName() spellings. Case-insensitive.
std::optional<ControllerKind> ResolveController(std::string_view name,
                                                const ControllerParams& params);

// Attacks outermost, then presets, then controllers.
std::vector<SweepCell> ExpandGrid(const ScenarioConfig& base,
                                  const GridSpec& grid);

struct SweepOutcome {
  SweepCell cell;
  std::optional<ScenarioResult> result;
  std::string error;
};

// Result order always matches `cells`, whatever `jobs` is.
std::vector<SweepOutcome> RunSweep(const std::vector<SweepCell>& cells,
                                   int jobs = 1);

class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}
  double achievable_lo() const { return lo_; }
  double achievable_hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

struct CalibrationResult {
  AttackProfile profile;
  double achieved_overshoot = 0.0;
  int evaluations = 0;
};

// Finds the range_scale in (0, 1] for which the baseline (ThresholdConstant)
// run overshoots by `target_overshoot`, to within `tolerance`.
CalibrationResult CalibrateAttackProfile(double target_overshoot,
                                         const ScenarioConfig& baseline,
                                         double tolerance = 0.5);

}  // namespace stopsim
