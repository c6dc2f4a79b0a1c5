// Orchestration: execute a parsed config (kinetic / particles / verify),
// write diagnostics, snapshots, reports and the manifest; render a run
// directory into a human-readable summary.
#pragma once

#include <filesystem>
#include <optional>

#include "kinchem/analysis.hpp"
#include "kinchem/config.hpp"

namespace kinchem {

inline constexpr const char* kCodeVersion = "kinchem 0.1.0";

// Exit codes shared with the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitVerification = 4;

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
};

// Runs the config; returns an exit code. All artifacts land in the output
// directory with a manifest listing file hashes.
int execute_run(const RunConfig& cfg, const RunOverrides& overrides = {});
int execute_run_file(const std::filesystem::path& config_path,
                     const RunOverrides& overrides = {});

// Runs one named verify check with its parameter object (defaults inside).
Report run_verify_check(const VerifyCheckConfig& check, std::uint64_t seed, int threads,
                        const std::filesystem::path& out_dir);

// Renders report.txt, the norm-vs-time CSV and the inequality-ratio table
// from a finished run directory; re-hashes the inventory and flags mismatches.
int emit_report(const std::filesystem::path& run_dir);

}  // namespace kinchem
