#pragma once

#include <string>
#include <string_view>

#include "flashguard/scenarios.hpp"

namespace flashguard::scenario_io {

// JSON text for a scenario. Amounts are decimal strings, addresses 0x-prefixed lowercase hex.
std::string to_json(const scenarios::ScenarioSpec& spec, int indent = 1);

// Throws Error(ParseError) naming the source, the line for syntax errors and the field path
// for schema errors.
scenarios::ScenarioSpec from_json(std::string_view text, const std::string& source = "<input>");

void save(const scenarios::ScenarioSpec& spec, const std::string& path);
scenarios::ScenarioSpec load(const std::string& path);

}  // namespace flashguard::scenario_io
