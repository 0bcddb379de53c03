#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pllab/json_io.hpp"

namespace pllab {

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config's seed
  std::optional<std::string> out;     // overrides the config's output_dir
  int jobs = 1;                       // 0 = logical cores
};

// Exit codes shared by every command:
//   0 all checks pass, 1 a certified bound failed (violation in the report),
//   2 usage/config error, 3 numerical failure.
inline constexpr int kExitPass = 0;
inline constexpr int kExitBoundViolation = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;

// Executes one experiment config (already parsed).  Writes report.json and
// report_meta.json under the output directory; flow tasks add trajectory CSVs.
int run_experiment(const json& config, const RunOptions& opts);

// Loads the config file, then runs it.  Missing/unparsable files map to 2.
int run_config_file(const std::string& path, const RunOptions& opts);

// Built-in acceptance suite: one PASS/FAIL line per criterion on stdout.
// list_only prints the criterion identifiers without running anything.
int run_suite(const RunOptions& opts, bool list_only);

// Deterministic catalogue listing on stdout.
int print_catalogue();

}  // namespace pllab
