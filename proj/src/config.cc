#include "stopsim/config.h"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace stopsim {

ConfigError::ConfigError(std::string path, int line, std::string field,
                         const std::string& message)
    : std::runtime_error(fmt::format("{}:{}: {}: {}", path, line, field, message)),
      path_(std::move(path)),
      line_(line),
      field_(std::move(field)) {}

namespace {

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::optional<double> ParseDouble(std::string_view s) {
  double value = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

struct Entry {
  std::string value;
  int line = 0;
};

// Schema: every accepted section and key. Grid sections are handled apart.
const std::map<std::string, std::set<std::string>>& Schema() {
  static const std::map<std::string, std::set<std::string>> kSchema = {
      {"scenario",
       {"preset", "attack", "controller", "target_speed", "detection_mode",
        "threshold", "seed", "max_sim_time"}},
      {"scene",
       {"s_start", "s_sign", "lateral_offset", "sign_height",
        "stop_line_offset", "visibility_modifier"}},
      {"front_camera", {"image_height", "image_width", "fov", "max_range"}},
      {"side_camera",
       {"enabled", "image_height", "image_width", "fov", "trigger_range"}},
      {"attack", {"confidence_scale", "range_scale"}},
      {"perception", {"c0", "d_ref", "quantize_bbox"}},
      {"threshold_constant", {"b_const"}},
      {"adjusted_braking",
       {"a_max", "brake_multiplier", "standoff", "update", "multiplier_min",
        "multiplier_max"}},
      {"cruise", {"k_p", "max_accel"}},
      {"dynamics", {"dt", "brake_decel", "stop_epsilon"}},
  };
  return kSchema;
}

const std::set<std::string> kGridKeys = {"presets", "attacks", "controllers"};

class Reader {
 public:
  Reader(std::string path, std::map<std::string, Entry> entries)
      : path_(std::move(path)), entries_(std::move(entries)) {}

  const Entry* Find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  [[noreturn]] void Fail(const std::string& key, const std::string& msg) const {
    const Entry* e = Find(key);
    throw ConfigError(path_, e ? e->line : 0, key, msg);
  }

  void Number(const std::string& key, double& out) const {
    if (const Entry* e = Find(key)) {
      const auto v = ParseDouble(e->value);
      if (!v) Fail(key, "expected a number, got '" + e->value + "'");
      out = *v;
    }
  }

  void Integer(const std::string& key, int& out) const {
    if (const Entry* e = Find(key)) {
      int v = 0;
      const auto* end = e->value.data() + e->value.size();
      const auto [ptr, ec] = std::from_chars(e->value.data(), end, v);
      if (ec != std::errc() || ptr != end) {
        Fail(key, "expected an integer, got '" + e->value + "'");
      }
      out = v;
    }
  }

  void Bool(const std::string& key, bool& out) const {
    if (const Entry* e = Find(key)) {
      const std::string v = Lower(e->value);
      if (v == "true" || v == "yes" || v == "1" || v == "on") {
        out = true;
      } else if (v == "false" || v == "no" || v == "0" || v == "off") {
        out = false;
      } else {
        Fail(key, "expected true/false, got '" + e->value + "'");
      }
    }
  }

  // Line of the entry whose key ends in `field`, for ValidationError mapping.
  std::pair<std::string, int> Locate(const std::string& field) const {
    for (const auto& [key, entry] : entries_) {
      const auto dot = key.rfind('.');
      if (key.substr(dot + 1) == field) return {key, entry.line};
    }
    return {field, 0};
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::map<std::string, Entry> entries_;
};

GridSpec ParseGrid(const std::string& path,
                   const std::map<std::string, Entry>& keys) {
  GridSpec grid;
  for (const auto& [key, entry] : keys) {
    const std::vector<std::string> items = SplitList(entry.value);
    if (items.empty()) {
      throw ConfigError(path, entry.line, key, "list must not be empty");
    }
    if (key == "presets") {
      for (const std::string& item : items) {
        if (Lower(item) == "all") {
          grid.presets.insert(grid.presets.end(), AllPresets().begin(),
                              AllPresets().end());
          continue;
        }
        const auto preset = ParsePresetKind(item);
        if (!preset) {
          throw ConfigError(path, entry.line, key,
                            "unknown preset '" + item + "'");
        }
        grid.presets.push_back(*preset);
      }
    } else if (key == "attacks") {
      grid.attacks = items;
    } else {
      grid.controllers = items;
    }
  }
  return grid;
}

}  // namespace

std::optional<double> ParseSpeed(const std::string& text) {
  std::string s = Lower(Trim(text));
  double factor = 1.0;
  for (const auto& [suffix, scale] :
       std::initializer_list<std::pair<const char*, double>>{
           {"km/h", 1.0 / 3.6}, {"kmh", 1.0 / 3.6}, {"kph", 1.0 / 3.6},
           {"m/s", 1.0}, {"mps", 1.0}}) {
    const std::string suf = suffix;
    if (s.size() >= suf.size() &&
        s.compare(s.size() - suf.size(), suf.size(), suf) == 0) {
      s = Trim(s.substr(0, s.size() - suf.size()));
      factor = scale;
      break;
    }
  }
  const auto value = ParseDouble(s);
  if (!value || *value < 0.0) return std::nullopt;
  return factor == 1.0 ? *value : KmhToMs(*value);
}

ParsedConfig ParseConfigText(const std::string& text, const std::string& path,
                             const ConfigOverrides& overrides) {
  std::map<std::string, Entry> entries;
  std::vector<std::pair<std::string, std::map<std::string, Entry>>> grid_sections;
  std::string section;
  bool in_grid = false;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(path, line_no, line, "unterminated section header");
      }
      section = Lower(Trim(line.substr(1, line.size() - 2)));
      in_grid = section == "grid" || section.rfind("grid.", 0) == 0;
      if (in_grid) {
        const std::string name =
            section == "grid" ? "grid" : section.substr(std::string("grid.").size());
        grid_sections.emplace_back(name, std::map<std::string, Entry>{});
      } else if (!Schema().contains(section)) {
        throw ConfigError(path, line_no, section, "unknown section");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path, line_no, line, "expected 'key = value'");
    }
    const std::string key = Lower(Trim(line.substr(0, eq)));
    const std::string value = Trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError(path, line_no, key, "key outside of any section");
    }
    if (in_grid) {
      if (!kGridKeys.contains(key)) {
        throw ConfigError(path, line_no, key, "unknown key in [" + section + "]");
      }
      grid_sections.back().second[key] = Entry{value, line_no};
      continue;
    }
    if (!Schema().at(section).contains(key)) {
      throw ConfigError(path, line_no, key, "unknown key in [" + section + "]");
    }
    const std::string full = section + "." + key;
    if (entries.contains(full)) {
      throw ConfigError(path, line_no, key, "duplicate key");
    }
    entries[full] = Entry{value, line_no};
  }

  if (overrides.preset) entries["scenario.preset"] = Entry{*overrides.preset, 0};
  if (overrides.attack) entries["scenario.attack"] = Entry{*overrides.attack, 0};
  if (overrides.controller) {
    entries["scenario.controller"] = Entry{*overrides.controller, 0};
  }
  if (overrides.seed) {
    entries["scenario.seed"] = Entry{std::to_string(*overrides.seed), 0};
  }

  const Reader r(path, std::move(entries));
  ScenarioConfig c;

  PresetKind preset = PresetKind::kTown07Standard;
  if (const Entry* e = r.Find("scenario.preset")) {
    const auto kind = ParsePresetKind(e->value);
    if (!kind) r.Fail("scenario.preset", "unknown preset '" + e->value + "'");
    preset = *kind;
  }
  ApplyPreset(c, preset);

  AttackKind attack = AttackKind::kNone;
  if (const Entry* e = r.Find("scenario.attack")) {
    const auto kind = ParseAttackKind(e->value);
    if (!kind) r.Fail("scenario.attack", "unknown attack '" + e->value + "'");
    attack = *kind;
  }
  c.attack = DefaultAttackProfile(attack);
  r.Number("attack.confidence_scale", c.attack.confidence_scale);
  r.Number("attack.range_scale", c.attack.range_scale);

  if (const Entry* e = r.Find("scenario.target_speed")) {
    const auto v = ParseSpeed(e->value);
    if (!v) r.Fail("scenario.target_speed", "expected a speed such as '85 kmh'");
    c.v_target = *v;
  }
  if (const Entry* e = r.Find("scenario.detection_mode")) {
    const std::string mode = Lower(e->value);
    if (mode == "deterministic") {
      c.perception.mode = DetectionMode::kDeterministic;
    } else if (mode == "stochastic") {
      c.perception.mode = DetectionMode::kStochastic;
    } else {
      r.Fail("scenario.detection_mode", "expected deterministic or stochastic");
    }
  }
  r.Number("scenario.threshold", c.perception.threshold);
  if (const Entry* e = r.Find("scenario.seed")) {
    std::uint64_t seed = 0;
    const auto* end = e->value.data() + e->value.size();
    const auto [ptr, ec] = std::from_chars(e->value.data(), end, seed);
    if (ec != std::errc() || ptr != end) {
      r.Fail("scenario.seed", "expected an unsigned 64-bit integer");
    }
    c.seed = seed;
  }
  r.Number("scenario.max_sim_time", c.max_sim_time);

  r.Number("scene.s_start", c.scene.s_start);
  r.Number("scene.s_sign", c.scene.s_sign);
  r.Number("scene.lateral_offset", c.scene.lateral_offset);
  r.Number("scene.sign_height", c.scene.sign_height);
  r.Number("scene.stop_line_offset", c.scene.stop_line_offset);
  r.Number("scene.visibility_modifier", c.visibility_modifier);

  r.Integer("front_camera.image_height", c.front_camera.image_height);
  r.Integer("front_camera.image_width", c.front_camera.image_width);
  r.Number("front_camera.fov", c.front_camera.fov_deg);
  r.Number("front_camera.max_range", c.front_camera.max_range);

  bool side_enabled = true;
  r.Bool("side_camera.enabled", side_enabled);
  CameraSpec side = DefaultSideCamera();
  r.Integer("side_camera.image_height", side.image_height);
  r.Integer("side_camera.image_width", side.image_width);
  r.Number("side_camera.fov", side.fov_deg);
  r.Number("side_camera.trigger_range", side.side_trigger_range);
  side.max_range = side.side_trigger_range;
  c.side_camera = side_enabled ? std::optional<CameraSpec>(side) : std::nullopt;

  r.Number("perception.c0", c.perception.model.c0);
  r.Number("perception.d_ref", c.perception.model.d_ref);
  r.Bool("perception.quantize_bbox", c.perception.quantize_bbox);

  r.Number("threshold_constant.b_const", c.controller_params.threshold.b_const);
  AdjustedBraking& adj = c.controller_params.adjusted;
  r.Number("adjusted_braking.a_max", adj.a_max);
  r.Number("adjusted_braking.brake_multiplier", adj.multiplier);
  r.Number("adjusted_braking.standoff", adj.standoff);
  r.Number("adjusted_braking.multiplier_min", adj.multiplier_min);
  r.Number("adjusted_braking.multiplier_max", adj.multiplier_max);
  if (const Entry* e = r.Find("adjusted_braking.update")) {
    const std::string v = Lower(e->value);
    if (v == "every_detection") {
      adj.update = UpdatePolicy::kEveryDetection;
    } else if (v == "first_detection") {
      adj.update = UpdatePolicy::kFirstDetection;
    } else {
      r.Fail("adjusted_braking.update",
             "expected every_detection or first_detection");
    }
  }

  std::string controller_name = "threshold";
  if (const Entry* e = r.Find("scenario.controller")) controller_name = e->value;
  const auto controller = ResolveController(controller_name, c.controller_params);
  if (!controller) {
    r.Fail("scenario.controller", "unknown controller '" + controller_name + "'");
  }
  c.controller = *controller;

  r.Number("cruise.k_p", c.cruise.k_p);
  r.Number("cruise.max_accel", c.cruise.max_throttle_accel);
  r.Number("dynamics.dt", c.dynamics.dt);
  r.Number("dynamics.brake_decel", c.dynamics.brake_decel);
  r.Number("dynamics.stop_epsilon", c.dynamics.stop_epsilon);

  try {
    ValidateScenario(c);
  } catch (const ValidationError& e) {
    const auto [key, line] = r.Locate(e.field());
    throw ConfigError(path, line, key, e.what());
  } catch (const DomainError& e) {
    throw ConfigError(path, 0, "config", e.what());
  }

  ParsedConfig parsed;
  parsed.scenario = std::move(c);
  for (const auto& [name, keys] : grid_sections) {
    parsed.grids.push_back(NamedGrid{name, ParseGrid(path, keys)});
  }
  return parsed;
}

ParsedConfig ParseConfigFile(const std::filesystem::path& path,
                             const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "file", "cannot open for reading");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfigText(buffer.str(), path.string(), overrides);
}

namespace {

std::string ControllerConfigName(const ControllerKind& kind) {
  if (std::holds_alternative<ThresholdConstant>(kind)) return "threshold";
  if (std::holds_alternative<AdjustedBraking>(kind)) return "adjusted";
  const auto& fusion = std::get<SideCameraFusion>(kind);
  return std::holds_alternative<ThresholdConstant>(fusion.inner) ? "side_fusion"
                                                                 : "combined";
}

}  // namespace

std::string EchoConfig(const ScenarioConfig& c,
                       const std::vector<NamedGrid>& grids) {
  std::string out;
  auto line = [&out](std::string_view key, const auto& value) {
    out += fmt::format("{} = {}\n", key, value);
  };

  out += "[scenario]\n";
  line("preset", PresetName(c.preset));
  line("attack", AttackName(c.attack.kind));
  line("controller", ControllerConfigName(c.controller));
  line("target_speed", fmt::format("{} m/s", c.v_target));
  line("detection_mode", c.perception.mode == DetectionMode::kDeterministic
                             ? "deterministic"
                             : "stochastic");
  line("threshold", c.perception.threshold);
  line("seed", c.seed);
  line("max_sim_time", c.max_sim_time);

  out += "\n[scene]\n";
  line("s_start", c.scene.s_start);
  line("s_sign", c.scene.s_sign);
  line("lateral_offset", c.scene.lateral_offset);
  line("sign_height", c.scene.sign_height);
  line("stop_line_offset", c.scene.stop_line_offset);
  line("visibility_modifier", c.visibility_modifier);

  out += "\n[front_camera]\n";
  line("image_height", c.front_camera.image_height);
  line("image_width", c.front_camera.image_width);
  line("fov", c.front_camera.fov_deg);
  line("max_range", c.front_camera.max_range);

  out += "\n[side_camera]\n";
  const CameraSpec side = c.side_camera.value_or(DefaultSideCamera());
  line("enabled", c.side_camera ? "true" : "false");
  line("image_height", side.image_height);
  line("image_width", side.image_width);
  line("fov", side.fov_deg);
  line("trigger_range", side.side_trigger_range);

  out += "\n[attack]\n";
  line("confidence_scale", c.attack.confidence_scale);
  line("range_scale", c.attack.range_scale);

  out += "\n[perception]\n";
  line("c0", c.perception.model.c0);
  line("d_ref", c.perception.model.d_ref);
  line("quantize_bbox", c.perception.quantize_bbox ? "true" : "false");

  out += "\n[threshold_constant]\n";
  line("b_const", c.controller_params.threshold.b_const);

  const AdjustedBraking& adj = c.controller_params.adjusted;
  out += "\n[adjusted_braking]\n";
  line("a_max", adj.a_max);
  line("brake_multiplier", adj.multiplier);
  line("standoff", adj.standoff);
  line("update", adj.update == UpdatePolicy::kEveryDetection ? "every_detection"
                                                             : "first_detection");
  line("multiplier_min", adj.multiplier_min);
  line("multiplier_max", adj.multiplier_max);

  out += "\n[cruise]\n";
  line("k_p", c.cruise.k_p);
  line("max_accel", c.cruise.max_throttle_accel);

  out += "\n[dynamics]\n";
  line("dt", c.dynamics.dt);
  line("brake_decel", c.dynamics.brake_decel);
  line("stop_epsilon", c.dynamics.stop_epsilon);

  for (const NamedGrid& g : grids) {
    out += fmt::format("\n[grid.{}]\n", g.name);
    std::vector<std::string> presets;
    for (PresetKind p : g.grid.presets) presets.emplace_back(PresetName(p));
    if (!presets.empty()) line("presets", fmt::format("{}", fmt::join(presets, ", ")));
    if (!g.grid.attacks.empty()) {
      line("attacks", fmt::format("{}", fmt::join(g.grid.attacks, ", ")));
    }
    if (!g.grid.controllers.empty()) {
      line("controllers", fmt::format("{}", fmt::join(g.grid.controllers, ", ")));
    }
  }
  return out;
}

std::string AttackFragment(const AttackProfile& profile) {
  return fmt::format(
      "# {} profile; pair with `attack = {}` in [scenario]\n[attack]\n"
      "confidence_scale = {}\nrange_scale = {}\n",
      AttackName(profile.kind), AttackName(profile.kind),
      profile.confidence_scale, profile.range_scale);
}

}  // namespace stopsim
