#pragma once

#include <utility>
#include <vector>

#include "vtrack/config.hpp"
#include "vtrack/harness.hpp"

namespace vtrack {

/// Builds a full scenario from a parsed config; every key is optional and
/// falls back to the compiled-in defaults. Unknown keys and malformed
/// values raise ConfigError with origin:line.
ScenarioConfig scenario_from_config(const Config& cfg);

/// Renders a scenario as a config that parses back to the identical
/// scenario (numbers are written with round-trip precision).
Config scenario_to_config(const ScenarioConfig& sc);

/// [compare] perturb = CF CR lines, in order.
std::vector<std::pair<double, double>> perturbations_from_config(
    const Config& cfg);

/// One segment line: "straight length=400 speed=16.7",
/// "arc radius=120 angle=90 speed=14", "clothoid length=80".
SegmentSpec parse_segment_line(const std::string& line, const std::string& origin,
                               int lineno);
std::string segment_to_line(const SegmentSpec& seg);

}  // namespace vtrack
