#pragma once

#include "CLI11.hpp"

namespace blockdp::cli {

// Each register_* adds one subcommand whose callback stores its exit code in
// rc: 0 success, 3 failed --check. Config problems are thrown as ConfigError
// or SpecError and mapped to exit code 2 in main.
void register_run(CLI::App& app, int& rc);
void register_bounds(CLI::App& app, int& rc);
void register_gen(CLI::App& app, int& rc);

}  // namespace blockdp::cli
