#pragma once

#include "hjb/cli/output.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hjb::cli {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
};

struct AcceptanceReport {
  std::vector<RunSummary> runs;
  std::vector<CriterionResult> criteria;
  int exit_code = 0; // max over the runs, and 3 when a criterion fails
};

// Runs every command with its acceptance configuration into subdirectories of
// `dir`, evaluates criteria 1-9, and writes acceptance.txt and summary.txt.
// Progress lines go to `progress` when it is non-null.
AcceptanceReport run_acceptance(const std::filesystem::path& dir, std::uint64_t seed,
                                std::ostream* progress);

// "criterion <id> PASS|FAIL <title>: <detail>"
std::string format_criterion(const CriterionResult& c);

} // namespace hjb::cli
