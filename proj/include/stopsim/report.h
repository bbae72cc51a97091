#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stopsim/scenario.h"

namespace stopsim {

inline constexpr const char* kTraceHeader =
    "t,s,v,b,detected_front,detected_side,confidence,est_distance";

inline constexpr const char* kSummaryHeader =
    "preset,attack,controller,stopped,stop_position,overshoot,margin,"
    "time_to_complete_stop,distance_at_brake,error";

// Lane coordinate of the sign in the reference map; travel is toward
// decreasing y, so a stop before the sign has y > kSignLaneY.
inline constexpr double kSignLaneY = -50.5;

// Floats with 6 decimals, booleans as 0/1, absent est_distance empty.
void WriteTraceCsv(std::ostream& out, const Trace& trace);

// Reads what WriteTraceCsv writes. Throws std::runtime_error with the line
// number on malformed input.
Trace ReadTraceCsv(std::istream& in);

void WriteSummaryCsv(std::ostream& out, const std::vector<SweepOutcome>& rows);

// Aligned text: a stopping-position table (one line per row, with the lane
// coordinate) and, per (attack, controller) group, a time-to-stop /
// distance-at-brake table over placements.
std::string FormatTables(const std::vector<SweepOutcome>& rows);

// Wraps one scenario run as a sweep row so `run` and `sweep` share output.
SweepOutcome OutcomeFromRun(const ScenarioConfig& config,
                            ScenarioResult result);

}  // namespace stopsim
