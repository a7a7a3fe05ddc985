#pragma once

// Subcommand orchestration shared by the CLI and the tests.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure (a
// diagnostic.txt is written into the output directory).

#include "cavity_bjj/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cavity_bjj {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_numerical = 2 };

struct RunOverrides {
    std::optional<std::string> out_dir;
    std::optional<double> stride;
    std::optional<double> horizon;
};

const std::vector<std::string>& subcommands();

/// Resolves the dimensionless parameter set (running the Wannier pipeline for a derived block).
DimensionlessParams resolve_params(const RunConfig& config);

/// Runs one subcommand on a parsed configuration and writes its artifacts.
int run(const std::string& subcommand, const RunConfig& config, const RunOverrides& overrides, std::ostream& log,
        std::ostream& err);

/// Loads the configuration file first; configuration problems map to exit code 1.
int run_file(const std::string& subcommand, const std::string& config_path, const RunOverrides& overrides,
             std::ostream& log, std::ostream& err);

} // namespace cavity_bjj
