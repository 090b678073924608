#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace shearmix {

// exit codes: 0 success, 2 usage, 3 validation, 4 I/O
enum CliExit : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitValidation = 3,
    kExitIo = 4,
};

struct RunConfig {
    std::string subcommand;
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    std::size_t samples = 200;
    std::size_t steps = 25;
    int grid = 256;
    double p = 0.1;
    double eps = 0.2;
    double delta = -1.0;  // unset: resolves to p/2
    int workers = 0;      // unset: hardware concurrency

    double effective_delta() const { return delta < 0.0 ? p / 2.0 : delta; }
};

struct ParseOutcome {
    int exit_code = kExitOk;
    bool should_run = false;  // false for help/usage outcomes
    RunConfig cfg;
    std::string message;  // usage or error text for the caller to print
};

// Parse argv (without the program name). Applies config-file values under
// CLI overrides and range-validates everything.
ParseOutcome parse_cli(const std::vector<std::string>& args);

struct ConfigError {
    int line;  // 0 when not line-specific
    std::string message;
};

// flat `key = value` file, '#' comments; keys match the CLI flag names.
// Throws ConfigError (validation, exit 3 at the CLI boundary).
std::vector<std::pair<std::string, std::string>> load_config(const std::string& path);

// Execute a parsed run; writes outputs under cfg.out_dir. Returns an exit code.
int run_cli(const RunConfig& cfg);

struct FullPipelineReport;  // experiments.hpp
struct EnsembleConfig;

// The full-pipeline CSV set (also used by the reproducibility acceptance test).
void write_full_outputs(const FullPipelineReport& rep, const EnsembleConfig& cfg,
                        const std::string& out_dir);

std::string cli_usage();
std::string cli_version();

} // namespace shearmix
