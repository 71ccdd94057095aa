#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pinsync/harness.hpp"
#include "pinsync/pinning.hpp"

namespace pinsync {

// {"n": int, "c": float, "pins": [{"node": int, "gain": float}, ...]}
nlohmann::json plan_to_json(const PinningPlan& plan);
PinningPlan plan_from_json(const nlohmann::json& j);

nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

// Accepts a single scenario object, an array of them, or {"scenarios": [...]}.
std::vector<Scenario> scenarios_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);

// Shortest decimal that round-trips.
std::string format_exact(double v);
// printf %.<digits>g
std::string format_sig(double v, int digits);

void write_report_text(std::ostream& os, const ComparisonReport& report);
void write_report_csv(std::ostream& os, const ComparisonReport& report);

// `index,eigenvalue` with 12 significant digits.
void write_spectrum_csv(std::ostream& os, const std::vector<double>& values);

}  // namespace pinsync
