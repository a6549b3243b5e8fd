#pragma once

#include <filesystem>
#include <iosfwd>

#include "abcoh/io.hpp"

namespace abcoh {

// Exit codes shared by the scenario runner and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPrecondition = 2;

// Executes a scenario file:
//   {"group": {...}, "measure": {...}, "out_dir": "out",
//    "pipeline": [{"cmd": "classify" | "transform-forward" |
//                  "transform-inverse" | "gns-verify" | "cocycle-build" |
//                  "cocycle-solve" | "cocycle-approx", ...params}, ...]}
// Artifacts (report.json, cocycle.csv, residuals.csv, summary.txt, ...) are
// written under out_dir; the ABELIAN_COH_OUT environment variable overrides
// out_dir. Identical inputs produce byte-identical artifacts.
// Returns kExitOk, kExitPrecondition for domain precondition violations, or
// kExitUsage for malformed input; diagnostics go to `log`.
int run_scenario(const std::filesystem::path& scenario_file, std::ostream& log);

}  // namespace abcoh
