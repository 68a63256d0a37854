#pragma once
/// Subcommands of the carnot tool. Each one runs a fixed set of checks and
/// returns a report section; module errors become FAIL entries.

#include "carnot/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace carnot {

struct RunConfig {
  std::string command;
  std::vector<std::string> args;  ///< positional arguments after the subcommand
  std::string group;              ///< group file, bundled name or path
  int grid = 0;                   ///< points per axis; 0 picks the command default
  double extent = 0.0;            ///< half-width of the box; 0 picks the default
  double eps = 0.0;               ///< covering or approximation scale; 0 picks the default
  std::uint64_t seed = 1;
  double tol = 0.0;  ///< overrides the command's primary tolerance when positive
  std::string out;   ///< report path; stdout when empty
  int cap = 5000;    ///< largest lattice size
  std::string map;   ///< map specification for check-diffeo
  bool all = false;  ///< report: run every section
};

/// Names accepted as RunConfig::command.
const std::vector<std::string>& subcommands();

/// Throws BadConfig for unknown commands, nonpositive tolerances, caps,
/// grids or scales.
void validate_config(const RunConfig& cfg);

struct RunResult {
  Report report;
  int exit_code = 0;
};

/// Validates, runs the subcommand and, when cfg.out is set, writes the
/// report atomically. Exit code 0 iff every asserted check passed.
RunResult run(const RunConfig& cfg);

}  // namespace carnot
