#pragma once

#include <iosfwd>
#include <string>

#include "config.hpp"

namespace tsallis::app {

struct RunOptions {
    std::string command;
    std::string out_dir = "out";
    bool strict = false;
    unsigned threads = 1;
};

// Exit codes.
inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitError = 2;

// Each command writes report.json (deterministic), metadata.json (timing and
// environment) and its table to the output directory and returns an exit code.
int run_price(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log);
int run_entropy(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log);
int run_dual(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log);
int run_sweep(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log);
int run_properties(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log);

int run_command(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log);

}  // namespace tsallis::app
