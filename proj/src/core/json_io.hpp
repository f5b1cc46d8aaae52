#ifndef SNAPDOP_CORE_JSON_IO_HPP
#define SNAPDOP_CORE_JSON_IO_HPP

#include <string>

#include "core/simulator.hpp"
#include "core/solver.hpp"

namespace snapdop {

inline constexpr int kSchemaVersion = 1;

// Scenario config JSON mirrors ScenarioConfig field names in snake_case.
// The TLE set comes either inline ("tle_set": [line, line, ...]) or from a
// file ("tle_file", resolved against base_dir). Errors carry the field name.
ScenarioConfig scenario_config_from_json(const std::string& json_text,
                                         const std::string& base_dir);
ScenarioConfig load_scenario_config(const std::string& path);

std::string scenario_config_to_json(const ScenarioConfig& config);

std::string solve_result_to_json(const SolveResult& result);
std::string differential_result_to_json(const DifferentialResult& result);

std::string truth_to_json(const ScenarioTruth& truth);

std::string monte_carlo_summary_to_json(const MonteCarloSummary& summary);

// FNV-1a 64-bit content digest, hex encoded (report provenance field).
std::string fnv1a_hex(const std::string& content);

}  // namespace snapdop

#endif
