#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pllab/json_io.hpp"

namespace pllab {

struct CriterionResult {
  int index = 0;
  std::string id;
  bool pass = false;
  std::string detail;  // one deterministic human-readable line
  json data;           // payload embedded in report.json
};

// Criteria 1..9 of the built-in suite.  Deterministic for a fixed seed;
// jobs only changes scheduling, never results.
std::vector<CriterionResult> run_acceptance_core(std::uint64_t seed,
                                                 int jobs = 1);

// Bundles results into the versioned report body (no timestamps).
json acceptance_report(const std::vector<CriterionResult>& results,
                       std::uint64_t seed);

}  // namespace pllab
