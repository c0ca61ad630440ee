#pragma once

#include <string>

#include "vmcyl/config.hpp"

namespace vmcyl {

enum class RunMode { solve, verify, confine, extend, sweep };

RunMode parse_run_mode(const std::string& s);

// Exit codes: 0 all requested checks pass, 1 a verdict failed,
// 2 configuration error, 3 numerical failure.
inline constexpr int exit_pass = 0;
inline constexpr int exit_verdict_fail = 1;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_numerical_failure = 3;

// Execute one mode, writing artifacts into cfg.out_dir.
int run(const RunConfig& cfg, RunMode mode);

} // namespace vmcyl
