#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pevp/error.hpp"
#include "pevp/problem.hpp"

namespace pevp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// 1 for argument, config and I/O problems; 2 for numerical failures.
int exit_code_for(ErrorKind kind);

/// "example1" | "example2" | "example3" | "config:<path>".
ParametricProblem make_problem(const std::string& spec, int n);

/// Hex SHA-256 of the config file for "config:<path>", "builtin" otherwise.
std::string problem_hash(const std::string& spec);

std::string sha256_hex(const std::string& data);

/// Plain-text record written next to every output:
///   key = value, one per line, parameters in insertion order.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> params;
  std::optional<std::uint64_t> seed;
  std::string config_hash;
  std::vector<std::string> outputs;

  void set(const std::string& key, const std::string& value);
  std::string render() const;
};

std::string tool_version();

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pevp::cli
