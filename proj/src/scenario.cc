#include "stopsim/scenario.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <thread>

namespace stopsim {

PlacementPreset DefaultPlacement(PresetKind kind) {
  switch (kind) {
    case PresetKind::kTown07Standard:
      return {kind, 2.0, 1.0};
    case PresetKind::kTown03Far:
    case PresetKind::kTown10Far:
      return {kind, 4.0, 0.99};
    case PresetKind::kTown03Near:
    case PresetKind::kTown10Near:
      return {kind, 1.0, 1.0};
  }
  return {};
}

const std::vector<PresetKind>& AllPresets() {
  static const std::vector<PresetKind> kAll = {
      PresetKind::kTown07Standard, PresetKind::kTown03Far,
      PresetKind::kTown03Near, PresetKind::kTown10Far, PresetKind::kTown10Near};
  return kAll;
}

const char* PresetName(PresetKind kind) {
  switch (kind) {
    case PresetKind::kTown07Standard:
      return "Town07_Standard";
    case PresetKind::kTown03Far:
      return "Town03_Far";
    case PresetKind::kTown03Near:
      return "Town03_Near";
    case PresetKind::kTown10Far:
      return "Town10_Far";
    case PresetKind::kTown10Near:
      return "Town10_Near";
  }
  return "?";
}

namespace {

std::string Normalize(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c == '-' || c == '_' || c == ' ') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return key;
}

}  // namespace

std::optional<PresetKind> ParsePresetKind(std::string_view name) {
  const std::string key = Normalize(name);
  for (PresetKind kind : AllPresets()) {
    if (Normalize(PresetName(kind)) == key) return kind;
  }
  return std::nullopt;
}

ScenarioConfig DefaultScenarioConfig(PresetKind preset) {
  ScenarioConfig config;
  ApplyPreset(config, preset);
  return config;
}

void ApplyPreset(ScenarioConfig& config, PresetKind kind) {
  const PlacementPreset placement = DefaultPlacement(kind);
  config.preset = kind;
  config.scene.lateral_offset = placement.lateral_offset;
  config.visibility_modifier = placement.visibility_modifier;
}

void ValidateScenario(const ScenarioConfig& config) {
  BuildScene(config.scene);
  ValidateCamera(config.front_camera);
  if (config.side_camera) ValidateCamera(*config.side_camera);
  ValidateAttackProfile(config.attack);
  ValidateController(config.controller);
  ValidateDynamics(config.dynamics);

  if (!(config.visibility_modifier > 0.0)) {
    throw ValidationError("visibility_modifier", "must be positive");
  }
  if (NeedsSideCamera(config.controller) && !config.side_camera) {
    throw ValidationError("side_camera",
                          "SideCameraFusion requires a side camera");
  }
  if (!(config.v_target > 0.0) || !std::isfinite(config.v_target)) {
    throw ValidationError("target_speed", "must be positive");
  }
  const double threshold = config.perception.threshold;
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ValidationError("threshold", "must lie in (0, 1)");
  }
  if (!(config.perception.model.c0 > 0.0 && config.perception.model.c0 <= 1.0)) {
    throw ValidationError("c0", "must lie in (0, 1]");
  }
  if (!(config.perception.model.d_ref > 0.0)) {
    throw ValidationError("d_ref", "must be positive");
  }
  if (!(config.cruise.k_p >= 0.0)) {
    throw ValidationError("k_p", "must be non-negative");
  }
  if (!(config.cruise.max_throttle_accel > 0.0)) {
    throw ValidationError("max_accel", "must be positive");
  }
  const double approach =
      2.0 * (config.scene.s_sign - config.scene.s_start) / config.v_target;
  if (!(config.max_sim_time >= approach)) {
    throw ValidationError("max_sim_time",
                          "too short for the approach (need at least " +
                              std::to_string(approach) + " s)");
  }
}

CameraSpec EffectiveFrontCamera(const ScenarioConfig& config) {
  CameraSpec camera = config.front_camera;
  camera.max_range *= config.visibility_modifier;
  return camera;
}

TraceMetrics MetricsFromTrace(const Trace& trace, const Scene& scene) {
  if (trace.empty()) throw ValidationError("trace", "must not be empty");
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (!(trace[i].t > trace[i - 1].t)) {
      throw ValidationError("trace", "time must be strictly increasing");
    }
  }

  TraceMetrics m;
  const TraceSample& last = trace.back();
  m.stop_position = last.s;

  const auto onset = std::find_if(trace.begin(), trace.end(),
                                  [](const TraceSample& x) { return x.b > 0.0; });
  if (onset != trace.end()) {
    m.brake_onset_t = onset->t;
    m.distance_at_brake = scene.s_sign - onset->s;
    const auto stop = std::find_if(onset, trace.end(), [](const TraceSample& x) {
      return x.v == 0.0;
    });
    if (stop != trace.end()) {
      m.stopped = true;
      m.stop_position = stop->s;
      m.time_to_complete_stop = stop->t - onset->t;
    }
  }

  m.overshoot =
      std::max(0.0, m.stop_position - scene.s_sign + scene.stop_line_offset);
  m.margin = m.overshoot > 0.0 ? 0.0 : std::max(0.0, scene.s_sign - m.stop_position);
  return m;
}

ScenarioResult RunScenario(const ScenarioConfig& config, std::uint64_t stream) {
  ValidateScenario(config);

  const Scene& scene = config.scene;
  const CameraSpec front_camera = EffectiveFrontCamera(config);
  const DynamicsConfig& dyn = config.dynamics;
  Rng rng(DeriveSeed(config.seed, stream));

  ScenarioResult result;
  const auto max_steps =
      static_cast<std::int64_t>(std::floor(config.max_sim_time / dyn.dt + 1e-9));
  result.trace.reserve(static_cast<std::size_t>(std::min<std::int64_t>(max_steps + 1, 1 << 20)));

  VehicleState vehicle;
  vehicle.s = scene.s_start;
  ControllerState ctrl;
  double last_b = 0.0;

  for (std::int64_t n = 0;; ++n) {
    vehicle.t = static_cast<double>(n) * dyn.dt;
    const double d = scene.s_sign - vehicle.s;

    const Observation front = ObserveFront(front_camera, scene, config.attack,
                                           config.perception, d, vehicle.t, rng);
    Observation side;
    side.t = vehicle.t;
    side.camera = Facing::kSide;
    if (config.side_camera) {
      side = ObserveSide(*config.side_camera, config.attack, config.perception,
                         d, vehicle.t, rng);
    } else if (config.perception.mode == DetectionMode::kStochastic) {
      rng.Uniform();  // keep the stream aligned with side-equipped runs
    }

    TraceSample sample{vehicle.t, vehicle.s,       vehicle.v,
                       last_b,    front.detected,  side.detected,
                       front.confidence, std::nullopt};

    if (vehicle.phase == Phase::kStopped) {
      result.trace.push_back(sample);
      break;
    }

    const ControlOutput out = StepController(
        config.controller, ctrl,
        ControlInput{front, config.side_camera ? &side : nullptr, vehicle,
                     front_camera, scene.sign_height, d});
    sample.b = out.b;
    sample.est_distance = out.est_distance;
    result.trace.push_back(sample);
    last_b = out.b;

    if (n >= max_steps) break;

    const double throttle =
        CruiseThrottle(vehicle.v, config.v_target, config.cruise.k_p,
                       config.cruise.max_throttle_accel, out.b > 0.0);
    vehicle = StepDynamics(vehicle, out.b, throttle, dyn);
  }

  result.metrics = MetricsFromTrace(result.trace, scene);
  return result;
}

std::optional<ControllerKind> ResolveController(std::string_view name,
                                                const ControllerParams& params) {
  const std::string key = Normalize(name);
  if (key == "threshold" || key == "thresholdconstant" || key == "baseline") {
    return params.threshold;
  }
  if (key == "adjusted" || key == "adjustedbraking" || key == "defense1") {
    return params.adjusted;
  }
  if (key == "sidefusion" || key == "sidecamerafusion" ||
      key == "sidecamerafusion(thresholdconstant)" || key == "defense2") {
    return SideCameraFusion{params.threshold};
  }
  if (key == "combined" || key == "sidecamerafusion(adjustedbraking)") {
    return SideCameraFusion{params.adjusted};
  }
  return std::nullopt;
}

std::vector<SweepCell> ExpandGrid(const ScenarioConfig& base,
                                  const GridSpec& grid) {
  std::vector<SweepCell> cells;
  const std::vector<PresetKind> presets =
      grid.presets.empty() ? std::vector<PresetKind>{base.preset} : grid.presets;
  const std::vector<std::string> attacks =
      grid.attacks.empty() ? std::vector<std::string>{AttackName(base.attack.kind)}
                           : grid.attacks;
  const std::vector<std::string> controllers =
      grid.controllers.empty()
          ? std::vector<std::string>{ControllerName(base.controller)}
          : grid.controllers;

  for (const std::string& attack_name : attacks) {
    for (PresetKind preset : presets) {
      for (const std::string& controller_name : controllers) {
        SweepCell cell;
        cell.preset = PresetName(preset);
        cell.attack = attack_name;
        cell.controller = controller_name;

        ScenarioConfig config = base;
        ApplyPreset(config, preset);
        const auto attack = ParseAttackKind(attack_name);
        const auto controller =
            ResolveController(controller_name, base.controller_params);
        if (!attack) {
          cell.error = "unknown attack '" + attack_name + "'";
        } else if (!controller) {
          cell.error = "unknown controller '" + controller_name + "'";
        } else {
          // Keep explicitly configured scales for the base attack.
          config.attack = *attack == base.attack.kind
                              ? base.attack
                              : DefaultAttackProfile(*attack);
          config.controller = *controller;
          cell.attack = AttackName(*attack);
          cell.controller = ControllerName(*controller);
          try {
            ValidateScenario(config);
            cell.config = std::move(config);
          } catch (const std::exception& e) {
            cell.error = e.what();
          }
        }
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

std::vector<SweepOutcome> RunSweep(const std::vector<SweepCell>& cells,
                                   int jobs) {
  if (cells.empty()) throw ValidationError("grid", "must not be empty");

  std::vector<SweepOutcome> outcomes(cells.size());
  auto run_row = [&](std::size_t i) {
    SweepOutcome& out = outcomes[i];
    out.cell = cells[i];
    if (!cells[i].config) {
      out.error = cells[i].error;
      return;
    }
    try {
      out.result = RunScenario(*cells[i].config, i);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  };

  const auto workers = static_cast<std::size_t>(std::clamp<int>(
      jobs, 1, static_cast<int>(cells.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_row(i);
    return outcomes;
  }

  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) run_row(i);
      });
    }
  }
  return outcomes;
}

CalibrationResult CalibrateAttackProfile(double target_overshoot,
                                         const ScenarioConfig& baseline,
                                         double tolerance) {
  if (!std::holds_alternative<ThresholdConstant>(baseline.controller)) {
    throw ValidationError("controller",
                          "calibration requires the ThresholdConstant baseline");
  }
  if (baseline.attack.kind == AttackKind::kNone) {
    throw ValidationError("attack", "cannot calibrate the None profile");
  }
  ValidateScenario(baseline);

  CalibrationResult result;
  auto overshoot_at = [&](double range_scale) {
    ScenarioConfig config = baseline;
    config.attack.range_scale = range_scale;
    ++result.evaluations;
    return RunScenario(config).metrics.overshoot;
  };

  // Overshoot is non-increasing in range_scale: a longer detection range
  // can only start braking earlier.
  constexpr double kMinScale = 1e-3;
  const double at_full = overshoot_at(1.0);
  const double at_min = overshoot_at(kMinScale);
  if (target_overshoot < at_full - tolerance ||
      target_overshoot > at_min + tolerance) {
    throw CalibrationError("target overshoot unreachable within range_scale "
                           "(0, 1]",
                           at_full, at_min);
  }

  auto finish = [&](double scale, double overshoot) {
    result.profile = baseline.attack;
    result.profile.range_scale = scale;
    result.achieved_overshoot = overshoot;
    return result;
  };
  if (std::abs(at_full - target_overshoot) <= tolerance) {
    return finish(1.0, at_full);
  }

  // Invariant: overshoot(lo) >= target > overshoot(hi).
  double lo = kMinScale, f_lo = at_min;
  double hi = 1.0, f_hi = at_full;
  for (int i = 0; i < 60 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = overshoot_at(mid);
    if (f_mid >= target_overshoot) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }

  const bool pick_lo =
      std::abs(f_lo - target_overshoot) <= std::abs(f_hi - target_overshoot);
  const double scale = pick_lo ? lo : hi;
  const double achieved = pick_lo ? f_lo : f_hi;
  if (std::abs(achieved - target_overshoot) > tolerance) {
    throw CalibrationError("no range_scale reaches the target within tolerance",
                           at_full, at_min);
  }
  return finish(scale, achieved);
}

}  // namespace stopsim
