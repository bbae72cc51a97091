#include "stopsim/report.h"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace stopsim {
namespace {

std::string Fixed(double x) { return fmt::format("{:.6f}", x); }

std::string Fixed(const std::optional<double>& x) {
  return x ? Fixed(*x) : std::string();
}

std::string CsvEscape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

double ParseField(const std::string& s, int line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error(fmt::format("trace line {}: bad number '{}'", line_no, s));
  }
  return value;
}

bool ParseFlag(const std::string& s, int line_no) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw std::runtime_error(fmt::format("trace line {}: bad flag '{}'", line_no, s));
}

// "Town07_Standard" -> "Town07 (Standard)".
std::string PlacementLabel(const std::string& preset) {
  const auto us = preset.find('_');
  if (us == std::string::npos) return preset;
  return preset.substr(0, us) + " (" + preset.substr(us + 1) + ")";
}

std::string Pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string RenderTable(const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) widths[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  auto render_row = [&](const std::vector<std::string>& row) {
    std::string line = "|";
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += " " + Pad(row[c], widths[c]) + " |";
    }
    return line + "\n";
  };
  std::string rule = "+";
  for (std::size_t w : widths) rule += std::string(w + 2, '-') + "+";
  rule += "\n";

  std::string out = rule + render_row(header) + rule;
  for (const auto& row : rows) out += render_row(row);
  return out + rule;
}

}  // namespace

void WriteTraceCsv(std::ostream& out, const Trace& trace) {
  out << kTraceHeader << '\n';
  for (const TraceSample& x : trace) {
    out << Fixed(x.t) << ',' << Fixed(x.s) << ',' << Fixed(x.v) << ','
        << Fixed(x.b) << ',' << (x.detected_front ? 1 : 0) << ','
        << (x.detected_side ? 1 : 0) << ',' << Fixed(x.confidence) << ','
        << Fixed(x.est_distance) << '\n';
  }
}

Trace ReadTraceCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw std::runtime_error("trace line 1: unexpected header");
  }
  Trace trace;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = SplitCsv(line);
    if (f.size() != 8) {
      throw std::runtime_error(
          fmt::format("trace line {}: expected 8 fields, got {}", line_no, f.size()));
    }
    TraceSample x;
    x.t = ParseField(f[0], line_no);
    x.s = ParseField(f[1], line_no);
    x.v = ParseField(f[2], line_no);
    x.b = ParseField(f[3], line_no);
    x.detected_front = ParseFlag(f[4], line_no);
    x.detected_side = ParseFlag(f[5], line_no);
    x.confidence = ParseField(f[6], line_no);
    if (!f[7].empty()) x.est_distance = ParseField(f[7], line_no);
    trace.push_back(x);
  }
  return trace;
}

void WriteSummaryCsv(std::ostream& out, const std::vector<SweepOutcome>& rows) {
  out << kSummaryHeader << '\n';
  for (const SweepOutcome& row : rows) {
    out << row.cell.preset << ',' << row.cell.attack << ','
        << CsvEscape(row.cell.controller) << ',';
    if (row.result) {
      const TraceMetrics& m = row.result->metrics;
      out << (m.stopped ? "true" : "false") << ',' << Fixed(m.stop_position)
          << ',' << Fixed(m.overshoot) << ',' << Fixed(m.margin) << ','
          << Fixed(m.time_to_complete_stop) << ',' << Fixed(m.distance_at_brake)
          << ',';
    } else {
      out << ",,,,,,";
    }
    out << CsvEscape(row.error) << '\n';
  }
}

std::string FormatTables(const std::vector<SweepOutcome>& rows) {
  std::string out = "Stopping positions\n";
  std::vector<std::vector<std::string>> stop_rows;
  for (const SweepOutcome& row : rows) {
    const std::string scenario = fmt::format(
        "{} / {} / {}", row.cell.preset, row.cell.attack, row.cell.controller);
    if (!row.result) {
      stop_rows.push_back({scenario, "error", "", "", row.error});
      continue;
    }
    const TraceMetrics& m = row.result->metrics;
    const double relative = row.cell.config->scene.s_sign - m.stop_position;
    stop_rows.push_back({scenario, fmt::format("{:.2f}", m.stop_position),
                         fmt::format("{:.1f}", kSignLaneY + relative),
                         fmt::format("{:+.2f}", relative),
                         m.stopped ? "stopped" : "did not stop"});
  }
  out += RenderTable({"Scenario", "Stop position s (m)", "Lane y (m)",
                      "Before sign (m)", "Outcome"},
                     stop_rows);

  // Group by (attack, controller), keeping first-appearance order.
  std::vector<std::pair<std::string, std::string>> groups;
  for (const SweepOutcome& row : rows) {
    const std::pair<std::string, std::string> key{row.cell.attack,
                                                  row.cell.controller};
    if (std::find(groups.begin(), groups.end(), key) == groups.end()) {
      groups.push_back(key);
    }
  }
  for (const auto& [attack, controller] : groups) {
    out += fmt::format("\n{} stop sign, {}\n",
                       attack == "None" ? std::string("Non-attacked")
                                        : "Attacked (" + attack + ")",
                       controller);
    std::vector<std::vector<std::string>> table;
    for (const SweepOutcome& row : rows) {
      if (row.cell.attack != attack || row.cell.controller != controller) continue;
      std::vector<std::string> cells{PlacementLabel(row.cell.preset)};
      if (row.result && row.result->metrics.time_to_complete_stop) {
        cells.push_back(fmt::format("{:.2f}", *row.result->metrics.time_to_complete_stop));
      } else {
        cells.push_back(row.result ? "no stop" : "error");
      }
      if (row.result && row.result->metrics.distance_at_brake) {
        cells.push_back(fmt::format("{:.2f}", *row.result->metrics.distance_at_brake));
      } else {
        cells.push_back(row.result ? "no brake" : "error");
      }
      table.push_back(std::move(cells));
    }
    out += RenderTable({"Map / stop sign position", "Time to complete stop (s)",
                        "Distance to stop sign (m)"},
                       table);
  }
  return out;
}

SweepOutcome OutcomeFromRun(const ScenarioConfig& config, ScenarioResult result) {
  SweepOutcome out;
  out.cell.preset = PresetName(config.preset);
  out.cell.attack = AttackName(config.attack.kind);
  out.cell.controller = ControllerName(config.controller);
  out.cell.config = config;
  out.result = std::move(result);
  return out;
}

}  // namespace stopsim
