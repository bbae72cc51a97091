// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stopsim/config.h"
#include "stopsim/report.h"
#include "stopsim/scenario.h"

using namespace stopsim;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Check {
  bool ok = true;
  std::string detail;

  void Expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

bool RelClose(double got, double want, double rel = 1e-9) {
  return std::abs(got - want) <= rel * std::max(1.0, std::abs(want));
}

ScenarioConfig Attacked(ControllerKind controller) {
  ScenarioConfig c = DefaultScenarioConfig();
  c.attack = DefaultAttackProfile(AttackKind::kLuV2);
  c.controller = std::move(controller);
  return c;
}

Check EquationExactness() {
  Check c;
  const auto t0 = Clock::now();
  CameraSpec cam = DefaultFrontCamera();
  c.Expect(RelClose(FocalLength(cam), 300.0), "focal(600, 90)");
  cam.image_height = 480;
  cam.fov_deg = 60.0;
  c.Expect(RelClose(FocalLength(cam), 415.692193816530550), "focal(480, 60)");
  cam = DefaultFrontCamera();
  c.Expect(RelClose(EstimateDistance(cam, 45.0, 0.75), 5.0), "estimate(45 px)");
  c.Expect(RelClose(EstimateDistance(cam, 9.0, 0.75), 25.0), "estimate(9 px)");
  c.Expect(RelClose(RequiredDeceleration(20.0, 20.0), 10.0), "a_req(20, 20)");
  c.Expect(RequiredDeceleration(0.0, 5.0) == 0.0, "a_req(0, 5)");
  c.Expect(RelClose(RequiredDeceleration(23.6111, 28.4), 9.81485991566901), "a_req(23.6111, 28.4)");
  c.Expect(RelClose(BrakeMessage(9.81, 9.81, 1.0), 1.0), "b(9.81)");
  c.Expect(RelClose(BrakeMessage(4.905, 9.81, 0.8), 0.4), "b(4.905, M=0.8)");
  c.Expect(BrakeMessage(25.0, 9.81, 1.0) == 1.0, "b clamp");
  const double dt = Seconds(t0);
  c.Expect(dt < 1.0, fmt::format("runtime {:.3f} s", dt));
  return c;
}

Check BaselineSafety() {
  Check c;
  const auto t0 = Clock::now();
  ScenarioConfig cfg = DefaultScenarioConfig(PresetKind::kTown07Standard);
  const auto m = RunScenario(cfg).metrics;
  const double dt = Seconds(t0);
  c.Expect(m.stopped, "not stopped");
  c.Expect(m.margin >= 1.0 && m.margin <= 8.0, fmt::format("margin {:.4f}", m.margin));
  c.Expect(dt < 1.0, fmt::format("runtime {:.3f} s", dt));
  c.detail += fmt::format("{}margin {:.4f} m", c.detail.empty() ? "" : "; ", m.margin);
  return c;
}

AttackProfile calibrated_luv2 = DefaultAttackProfile(AttackKind::kLuV2);

Check AttackOvershoot() {
  Check c;
  const auto t0 = Clock::now();
  ScenarioConfig cfg = Attacked(ThresholdConstant{});
  try {
    const CalibrationResult cal = CalibrateAttackProfile(10.3, cfg);
    const double dt = Seconds(t0);
    calibrated_luv2 = cal.profile;
    cfg.attack = cal.profile;
    const auto m = RunScenario(cfg).metrics;
    c.Expect(std::abs(m.overshoot - 10.3) <= 0.5, fmt::format("overshoot {:.4f}", m.overshoot));
    c.Expect(dt < 10.0, fmt::format("calibration {:.3f} s", dt));
    c.detail += fmt::format("{}overshoot {:.4f} m at range_scale {:.6f}, {:.3f} s",
                            c.detail.empty() ? "" : "; ", m.overshoot,
                            cal.profile.range_scale, dt);
  } catch (const std::exception& e) {
    c.Expect(false, e.what());
  }
  return c;
}

Check Recovery(ControllerKind kind, double lo, double hi) {
  Check c;
  ScenarioConfig cfg = Attacked(std::move(kind));
  cfg.attack = calibrated_luv2;
  const auto m = RunScenario(cfg).metrics;
  c.Expect(m.stopped, "not stopped");
  c.Expect(m.margin >= lo && m.margin <= hi, fmt::format("margin {:.4f}", m.margin));
  c.detail += fmt::format("{}margin {:.4f} m", c.detail.empty() ? "" : "; ", m.margin);
  return c;
}

Check TimeToStopBand() {
  Check c;
  double t_lo = 1e9, t_hi = -1e9, d_lo = 1e9, d_hi = -1e9;
  for (bool attacked : {false, true}) {
    for (PresetKind preset : AllPresets()) {
      ScenarioConfig cfg = DefaultScenarioConfig(preset);
      if (attacked) cfg.attack = calibrated_luv2;
      cfg.controller = SideCameraFusion{AdjustedBraking{}};
      const auto m = RunScenario(cfg).metrics;
      const std::string row = fmt::format("{}/{}", PresetName(preset), attacked ? "LuV2" : "None");
      if (!m.stopped || !m.time_to_complete_stop || !m.distance_at_brake) {
        c.Expect(false, row + " did not stop");
        continue;
      }
      const double t = *m.time_to_complete_stop, d = *m.distance_at_brake;
      c.Expect(t >= 2.4 && t <= 3.0, fmt::format("{} time {:.3f}", row, t));
      c.Expect(d >= 24.0 && d <= 42.0, fmt::format("{} distance {:.3f}", row, d));
      t_lo = std::min(t_lo, t);
      t_hi = std::max(t_hi, t);
      d_lo = std::min(d_lo, d);
      d_hi = std::max(d_hi, d);
    }
  }
  c.detail += fmt::format("{}time {:.2f}-{:.2f} s, distance {:.2f}-{:.2f} m",
                          c.detail.empty() ? "" : "; ", t_lo, t_hi, d_lo, d_hi);
  return c;
}

Check IntegratorConvergence() {
  Check c;
  for (double v0 : {10.0, 23.6111, 30.0}) {
    const double a = 9.0;
    const DynamicsConfig dyn{0.01, a, 0.0};
    VehicleState s;
    s.v = v0;
    s.phase = Phase::kCruising;
    while (s.phase != Phase::kStopped) s = StepDynamics(s, 1.0, 0.0, dyn);
    const double exact = v0 * v0 / (2.0 * a);
    const double rel = std::abs(s.s - exact) / exact;
    c.Expect(rel <= 0.01, fmt::format("v={} rel err {:.4f}%", v0, 100.0 * rel));
  }
  return c;
}

Check DetectionRate() {
  Check c;
  Rng rng(DeriveSeed(42, 0));
  int hits = 0;
  constexpr int kFrames = 10000;
  for (int i = 0; i < kFrames; ++i) {
    hits += SampleDetection(0.75, DetectionMode::kStochastic, 0.25, rng) ? 1 : 0;
  }
  const double rate = static_cast<double>(hits) / kFrames;
  c.Expect(std::abs(rate - 0.75) <= 0.02, fmt::format("rate {:.4f}", rate));
  c.detail += fmt::format("{}rate {:.4f}", c.detail.empty() ? "" : "; ", rate);
  return c;
}

Check PropertySuites() {
  Check c;
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // Projection / estimation round trip.
  for (int i = 0; i < 2000; ++i) {
    CameraSpec cam = DefaultFrontCamera();
    cam.image_height = 100 + static_cast<int>(1900 * u(gen));
    cam.fov_deg = 10.0 + 160.0 * u(gen);
    const double d = 0.5 + 100.0 * u(gen), h = 0.2 + 2.0 * u(gen);
    const double back = EstimateDistance(cam, ProjectBboxHeight(cam, d, h), h);
    if (std::abs(back - d) > 1e-9 * d) {
      c.Expect(false, "round trip");
      break;
    }
  }

  // Brake clamp and common scaling.
  for (int i = 0; i < 2000; ++i) {
    const double a = 30.0 * u(gen), a_max = 0.5 + 15.0 * u(gen);
    const double m = 0.6 + 0.4 * u(gen), k = 0.01 + 100.0 * u(gen);
    const double b = BrakeMessage(a, a_max, m);
    if (b < 0.0 || b > 1.0 || std::abs(BrakeMessage(k * a, k * a_max, m) - b) > 1e-12) {
      c.Expect(false, "brake clamp/scaling");
      break;
    }
  }

  // Fusion dominance, per step and per run.
  for (int i = 0; i < 20; ++i) {
    AttackProfile attack = DefaultAttackProfile(AttackKind::kCustom);
    attack.range_scale = 0.05 + 0.95 * u(gen);
    attack.confidence_scale = 0.05 + 0.95 * u(gen);
    for (const InnerController& inner :
         {InnerController{ThresholdConstant{}}, InnerController{AdjustedBraking{}}}) {
      ScenarioConfig plain = DefaultScenarioConfig();
      plain.attack = attack;
      plain.controller = std::visit([](const auto& x) -> ControllerKind { return x; }, inner);
      ScenarioConfig fused = plain;
      fused.controller = SideCameraFusion{inner};
      const auto a = RunScenario(plain);
      const auto b = RunScenario(fused);
      if (b.metrics.overshoot > a.metrics.overshoot + 1e-9) {
        c.Expect(false, "fusion overshoot dominance");
      }
      // Until the fused run starts braking harder, trajectories coincide.
      const std::size_t n = std::min(a.trace.size(), b.trace.size());
      for (std::size_t k = 0; k < n; ++k) {
        if (b.trace[k].s != a.trace[k].s) break;
        if (b.trace[k].b < a.trace[k].b) {
          c.Expect(false, "fusion command dominance");
          break;
        }
      }
    }
  }

  // Monotone safety in detection distance.
  std::vector<double> ranges(30);
  for (double& r : ranges) r = 20.0 + 22.0 * u(gen);
  std::sort(ranges.begin(), ranges.end());
  for (const ControllerKind& kind :
       {ControllerKind{ThresholdConstant{}}, ControllerKind{AdjustedBraking{}}}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double r : ranges) {
      ScenarioConfig cfg = DefaultScenarioConfig();
      cfg.controller = kind;
      cfg.front_camera.max_range = r;
      const double overshoot = RunScenario(cfg).metrics.overshoot;
      if (overshoot > prev) c.Expect(false, fmt::format("monotone safety at {:.3f}", r));
      prev = overshoot;
    }
  }

  // Attacked never detects earlier.
  for (PresetKind preset : AllPresets()) {
    const double clean =
        *RunScenario(DefaultScenarioConfig(preset)).metrics.distance_at_brake;
    for (AttackKind kind : {AttackKind::kChen, AttackKind::kEykholt, AttackKind::kLuV2,
                            AttackKind::kLuV3, AttackKind::kYang}) {
      ScenarioConfig cfg = DefaultScenarioConfig(preset);
      cfg.attack = DefaultAttackProfile(kind);
      const auto d = RunScenario(cfg).metrics.distance_at_brake;
      if (!d || *d > clean) c.Expect(false, fmt::format("earlier detection {}", AttackName(kind)));
    }
  }

  // Bitwise determinism of run and sweep under a fixed seed, any jobs.
  ScenarioConfig base = DefaultScenarioConfig();
  base.perception.mode = DetectionMode::kStochastic;
  base.seed = 31337;
  GridSpec grid{AllPresets(), {"None", "LuV2", "Chen"}, {"threshold", "combined"}};
  const auto cells = ExpandGrid(base, grid);
  const auto serial = RunSweep(cells, 1);
  for (int jobs : {2, 3, 8}) {
    const auto par = RunSweep(cells, jobs);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!par[i].result || !serial[i].result || par[i].result->trace != serial[i].result->trace) {
        c.Expect(false, fmt::format("sweep row {} differs at jobs={}", i, jobs));
        break;
      }
    }
  }
  if (RunScenario(base).trace != RunScenario(base).trace) c.Expect(false, "run determinism");
  return c;
}

Check ReproductionArtifact() {
  Check c;
  const auto t0 = Clock::now();
  const ParsedConfig parsed =
      ParseConfigFile(std::string(STOPSIM_CONFIG_DIR) + "/reproduction.ini");
  std::vector<SweepCell> cells;
  for (const NamedGrid& g : parsed.grids) {
    const auto part = ExpandGrid(parsed.scenario, g.grid);
    cells.insert(cells.end(), part.begin(), part.end());
  }
  const auto rows = RunSweep(cells, 4);
  const std::string tables = FormatTables(rows);
  const double dt = Seconds(t0);

  c.Expect(rows.size() == 16, fmt::format("{} rows", rows.size()));
  for (const auto& r : rows) c.Expect(r.result.has_value(), "row failed: " + r.error);
  c.Expect(tables.find("Stopping positions") != std::string::npos, "no stopping table");
  for (const char* col : {"Stop position s (m)", "Lane y (m)", "Map / stop sign position",
                          "Time to complete stop (s)", "Distance to stop sign (m)"}) {
    c.Expect(tables.find(col) != std::string::npos, std::string("missing column ") + col);
  }
  for (const char* row : {"Town07 (Standard)", "Town03 (Far)", "Town03 (Near)",
                          "Town10 (Far)", "Town10 (Near)"}) {
    c.Expect(tables.find(row) != std::string::npos, std::string("missing row ") + row);
  }
  std::size_t groups = 0;
  for (std::size_t p = tables.find("Map / stop sign position"); p != std::string::npos;
       p = tables.find("Map / stop sign position", p + 1)) {
    ++groups;
  }
  c.Expect(groups >= 2, fmt::format("{} placement tables", groups));
  c.Expect(dt < 30.0, fmt::format("runtime {:.3f} s", dt));
  c.detail += fmt::format("{}{} rows, {} placement tables, {:.3f} s",
                          c.detail.empty() ? "" : "; ", rows.size(), groups, dt);
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Check()> fn;
  };
  const std::vector<Criterion> criteria = {
      {"equation exactness", EquationExactness},
      {"baseline safety", BaselineSafety},
      {"attack overshoot after calibration", AttackOvershoot},
      {"adjusted braking recovery",
       [] { return Recovery(AdjustedBraking{}, 2.0, 10.0); }},
      {"side camera recovery",
       [] { return Recovery(SideCameraFusion{ThresholdConstant{}}, 1.0, 6.0); }},
      {"time-to-stop band, combined defenses", TimeToStopBand},
      {"integrator convergence", IntegratorConvergence},
      {"stochastic detection rate", DetectionRate},
      {"property suites", PropertySuites},
      {"reproduction sweep artifact", ReproductionArtifact},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    failed += c.ok ? 0 : 1;
    fmt::print("{} criterion {:>2}: {}{}\n", c.ok ? "PASS" : "FAIL", i + 1,
               criteria[i].name, c.detail.empty() ? "" : " (" + c.detail + ")");
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
