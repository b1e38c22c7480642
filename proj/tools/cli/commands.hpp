#pragma once

#include <ostream>

namespace hidsense::cli {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

/// Subcommands: simulate, descriptors, decode, analyze.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hidsense::cli
