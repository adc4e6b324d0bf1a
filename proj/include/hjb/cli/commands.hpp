#pragma once

#include "hjb/cli/config.hpp"
#include "hjb/cli/output.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>

namespace hjb::cli {

// Each runner writes its CSVs into `dir` (created if missing) and returns the
// summary without writing it. Module exceptions propagate.
RunSummary run_exact(const ExactParams& p, const std::filesystem::path& dir);
RunSummary run_radial(const RadialParams& p, const std::filesystem::path& dir);
RunSummary run_grid2d(const Grid2dParams& p, const std::filesystem::path& dir);
RunSummary run_monotone(const MonotoneParams& p, const std::filesystem::path& dir);
RunSummary run_simulate(const SimulateParams& p, std::uint64_t seed,
                        const std::filesystem::path& dir);
RunSummary run_verify(const VerifyParams& p, std::uint64_t seed, const std::filesystem::path& dir);
RunSummary run_regime(const RegimeParams& p, std::uint64_t seed, const std::filesystem::path& dir);

// Exit code for an exception escaping a runner: 1 for configuration, domain
// and precondition errors, 2 for solver failures.
int exit_code_for(const std::exception& e);

// Runs one command other than "all", maps exceptions to exit codes and writes
// summary.txt into the output directory. Never throws for module errors.
RunSummary execute(const std::string& command, const nlohmann::json& parameters,
                   std::uint64_t seed, const std::filesystem::path& dir);

// Entry point shared by the executable: dispatches "all" to the acceptance
// suite. Returns the process exit code.
int run(const RunConfig& config, bool quiet, std::ostream& out, std::ostream& err);

} // namespace hjb::cli
