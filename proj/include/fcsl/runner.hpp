// Experiment orchestration behind the CLI subcommands. Each runner writes
// its artifacts (CSV tables, binary snapshots, the resolved config echo)
// under the output directory and returns the process exit code.
#pragma once

#include <string>

#include "fcsl/config.hpp"

namespace fcsl {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Verbosity comes from FCSL_LOG={error,warn,info,debug}; output goes to
// stderr and never affects results.
void log_message(LogLevel level, const std::string& msg);

int run_simulate(RunConfig cfg, const std::string& out_dir);
int run_check(RunConfig cfg, const std::string& out_dir);
int run_ergodic(RunConfig cfg, const std::string& out_dir);
int run_report(const std::string& out_dir);

} // namespace fcsl
