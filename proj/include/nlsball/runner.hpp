#pragma once

#include "nlsball/config.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace nlsball {

enum ExitCode : int {
    ExitSuccess = 0,
    ExitValidation = 2,
    ExitDivergence = 3,
    ExitBudget = 4,
};

struct RunResult {
    int exit_code = ExitSuccess;
    std::vector<std::filesystem::path> artifacts; // relative to the output directory
    std::string message;
};

/// Executes cfg.command, writing its artifacts into cfg.output_dir and a short
/// summary to `log`. Failures are reported through the exit code and an
/// error.json file instead of exceptions.
RunResult run(const RunConfig& cfg, std::ostream& log);

/// Writes error.json into `dir` (created if needed).
void write_error_report(const std::filesystem::path& dir, int exit_code, std::string_view kind,
                        std::string_view message, std::uint64_t config_hash);

} // namespace nlsball
