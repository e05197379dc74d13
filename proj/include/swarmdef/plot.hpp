#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "swarmdef/bench.hpp"
#include "swarmdef/simulation.hpp"

namespace swarmdef::plot {

// Parses the trace CSV written by scenario_io::write_trace_csv.
std::vector<TraceRecord> read_trace_csv(std::istream& in);

// One polyline per agent (attackers red, defenders blue), plus P and the safe
// areas when a world is given.
std::string trajectory_svg(const std::vector<TraceRecord>& records,
                           const std::optional<WorldGeometry>& world = std::nullopt);

// Median solve time per grid cell, one series per solver, log scale.
std::string bench_svg(const std::vector<BenchSummary>& summary);

}  // namespace swarmdef::plot
