#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "bconvex/problem.hpp"

namespace bconvex {

/// Parses a problem config (strict: unknown keys rejected, schema_version
/// required). Throws ConfigError with the offending key named.
ProblemSpec parse_problem_config(const nlohmann::json& j);

ProblemSpec load_problem_config(const std::string& path);

/// Canonical echo of a config for embedding in reports (defaults filled in).
nlohmann::ordered_json config_echo(const nlohmann::json& j);

} // namespace bconvex
