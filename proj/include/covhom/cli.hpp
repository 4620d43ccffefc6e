#pragma once

#include "covhom/report.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace covhom {

enum ExitCode : int { kExitPass = 0, kExitTolerance = 1, kExitSchema = 2, kExitSolver = 3 };

struct RunOptions {
    std::string config_path;
    std::string command;  ///< alpha, beta, homogenize, subcover, spaces, validate
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
};

struct RunResult {
    int exit_code = kExitPass;
    std::vector<std::string> artifacts;
    std::vector<ErrorRecord> errors;
    std::string summary;
};

const std::vector<std::string>& known_commands();

/// Loads the config, runs the command and writes its artifacts. Never throws for
/// config, solver or tolerance failures; they become error records and exit codes.
RunResult run(const RunOptions& options);

}  // namespace covhom
