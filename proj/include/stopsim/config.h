#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stopsim/scenario.h"

namespace stopsim {

// Error in a configuration file; what() reads "path:line: field: message".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, int line, std::string field,
              const std::string& message);

  const std::string& path() const { return path_; }
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string path_;
  int line_;
  std::string field_;
};

struct NamedGrid {
  std::string name;
  GridSpec grid;
};

struct ParsedConfig {
  ScenarioConfig scenario;
  std::vector<NamedGrid> grids;  // file order
};

// Command-line overrides applied on top of the file before validation.
struct ConfigOverrides {
  std::optional<std::string> preset;
  std::optional<std::string> attack;
  std::optional<std::string> controller;
  std::optional<std::uint64_t> seed;
};

ParsedConfig ParseConfigText(const std::string& text,
                             const std::string& path = "<string>",
                             const ConfigOverrides& overrides = {});
ParsedConfig ParseConfigFile(const std::filesystem::path& path,
                             const ConfigOverrides& overrides = {});

// Parses "85 kmh", "85 km/h", "23.6 m/s", "23.6 mps" or a bare number (m/s).
std::optional<double> ParseSpeed(const std::string& text);

// Fully resolved configuration in the same format ParseConfigText reads.
// Re-parsing the echo reproduces the scenario exactly.
std::string EchoConfig(const ScenarioConfig& config,
                       const std::vector<NamedGrid>& grids = {});

// [attack] fragment for a calibrated profile.
std::string AttackFragment(const AttackProfile& profile);

}  // namespace stopsim
