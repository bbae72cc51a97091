// stopsim: run, sweep, calibrate and validate stop-sign braking scenarios.
//
// Exit codes: 0 success, 2 config error, 3 I/O error, 4 every sweep row
// failed, 5 calibration target unreachable.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "stopsim/config.h"
#include "stopsim/report.h"
#include "stopsim/scenario.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitSweepFailed = 4;
constexpr int kExitCalibration = 5;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> preset;
  std::optional<std::string> attack;
  std::optional<std::string> controller;
  double target = 0.0;
};

stopsim::ParsedConfig LoadConfig(const Options& opt) {
  stopsim::ConfigOverrides overrides{opt.preset, opt.attack, opt.controller,
                                     opt.seed};
  if (opt.config_path.empty()) {
    return stopsim::ParseConfigText("", "<defaults>", overrides);
  }
  return stopsim::ParseConfigFile(opt.config_path, overrides);
}

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError(fmt::format("cannot create output directory '{}'", dir.string()));
  }
}

template <class Fn>
void WriteFile(const fs::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  fn(out);
  out.flush();
  if (!out) throw IoError(fmt::format("write failed for '{}'", path.string()));
}

void PrintSummary(const std::vector<stopsim::SweepOutcome>& rows) {
  stopsim::WriteSummaryCsv(std::cout, rows);
}

int CmdValidate(const Options& opt) {
  const stopsim::ParsedConfig parsed = LoadConfig(opt);
  std::cout << stopsim::EchoConfig(parsed.scenario, parsed.grids);
  return kExitOk;
}

int CmdRun(const Options& opt) {
  const stopsim::ParsedConfig parsed = LoadConfig(opt);
  const fs::path out = opt.out_dir.empty() ? fs::path("out") : fs::path(opt.out_dir);
  EnsureDir(out);

  std::vector<stopsim::SweepOutcome> rows;
  rows.push_back(stopsim::OutcomeFromRun(parsed.scenario,
                                         stopsim::RunScenario(parsed.scenario)));

  WriteFile(out / "trace.csv", [&](std::ostream& os) {
    stopsim::WriteTraceCsv(os, rows.front().result->trace);
  });
  WriteFile(out / "summary.csv",
            [&](std::ostream& os) { stopsim::WriteSummaryCsv(os, rows); });
  WriteFile(out / "config_echo.ini", [&](std::ostream& os) {
    os << stopsim::EchoConfig(parsed.scenario);
  });
  PrintSummary(rows);
  return kExitOk;
}

int CmdSweep(const Options& opt) {
  const stopsim::ParsedConfig parsed = LoadConfig(opt);
  const fs::path out = opt.out_dir.empty() ? fs::path("out") : fs::path(opt.out_dir);
  EnsureDir(out);

  std::vector<stopsim::SweepCell> cells;
  if (parsed.grids.empty()) {
    cells = stopsim::ExpandGrid(parsed.scenario, {});
  }
  for (const stopsim::NamedGrid& g : parsed.grids) {
    auto expanded = stopsim::ExpandGrid(parsed.scenario, g.grid);
    cells.insert(cells.end(), std::make_move_iterator(expanded.begin()),
                 std::make_move_iterator(expanded.end()));
  }

  const auto rows = stopsim::RunSweep(cells, opt.jobs);

  EnsureDir(out / "traces");
  std::size_t ok = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].result) continue;
    ++ok;
    WriteFile(out / "traces" / fmt::format("row_{:03d}.csv", i),
              [&](std::ostream& os) {
                stopsim::WriteTraceCsv(os, rows[i].result->trace);
              });
  }
  WriteFile(out / "summary.csv",
            [&](std::ostream& os) { stopsim::WriteSummaryCsv(os, rows); });
  const std::string tables = stopsim::FormatTables(rows);
  WriteFile(out / "table.txt", [&](std::ostream& os) { os << tables; });
  WriteFile(out / "config_echo.ini", [&](std::ostream& os) {
    os << stopsim::EchoConfig(parsed.scenario, parsed.grids);
  });
  std::cout << tables;
  return ok > 0 ? kExitOk : kExitSweepFailed;
}

int CmdCalibrate(const Options& opt) {
  const stopsim::ParsedConfig parsed = LoadConfig(opt);
  try {
    const auto cal = stopsim::CalibrateAttackProfile(opt.target, parsed.scenario);
    const std::string fragment = stopsim::AttackFragment(cal.profile);
    if (!opt.out_dir.empty()) {
      const fs::path out(opt.out_dir);
      EnsureDir(out);
      WriteFile(out / "attack_profile.ini", [&](std::ostream& os) { os << fragment; });
    }
    std::cout << fragment;
    std::cout << fmt::format("achieved_overshoot = {:.6f}\n", cal.achieved_overshoot);
    return kExitOk;
  } catch (const stopsim::CalibrationError& e) {
    std::cerr << "calibration failed: " << e.what() << "\n"
              << fmt::format("achievable overshoot interval: [{:.6f}, {:.6f}] m\n",
                             e.achievable_lo(), e.achievable_hi());
    return kExitCalibration;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perception-in-the-loop stop-sign braking simulator"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&opt](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "Scenario configuration file");
    cmd->add_option("--seed", opt.seed, "Random seed (overrides the config)");
    cmd->add_option("--preset", opt.preset, "Placement preset");
    cmd->add_option("--attack", opt.attack, "Attack profile name");
    cmd->add_option("--controller", opt.controller,
                    "threshold | adjusted | side_fusion | combined");
  };

  CLI::App* run = app.add_subcommand("run", "Run one scenario");
  add_common(run);
  run->add_option("--out", opt.out_dir, "Output directory");

  CLI::App* sweep = app.add_subcommand("sweep", "Run every [grid.*] cell");
  add_common(sweep);
  sweep->add_option("--out", opt.out_dir, "Output directory");
  sweep->add_option("--jobs", opt.jobs, "Parallel rows")->check(CLI::PositiveNumber);

  CLI::App* calibrate =
      app.add_subcommand("calibrate", "Fit an attack's range_scale to an overshoot");
  add_common(calibrate);
  calibrate->add_option("--target", opt.target, "Target overshoot, meters")
      ->required();
  calibrate->add_option("--out", opt.out_dir,
                        "Directory for attack_profile.ini (stdout only if absent)");

  CLI::App* validate = app.add_subcommand("validate", "Parse and echo a config");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return CmdRun(opt);
    if (*sweep) return CmdSweep(opt);
    if (*calibrate) return CmdCalibrate(opt);
    return CmdValidate(opt);
  } catch (const stopsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const stopsim::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
