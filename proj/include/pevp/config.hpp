#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pevp/problem.hpp"

namespace pevp {

/// Build a problem from a JSON config document; see docs/problem_config.md
/// for the schema. Entry indices are 1-based.
ParametricProblem problem_from_config(const nlohmann::json& config);

/// Reads and parses `path`, then defers to the overload above.
ParametricProblem problem_from_config(const std::filesystem::path& path);

}  // namespace pevp
