#pragma once

namespace scarfsim {

// Command-line entry point (classify, simulate, edge, fig1, sweep).
// Exit codes: 0 success, 2 input error, 3 numerical failure, 4 not applicable.
int run_cli(int argc, const char* const* argv);

}  // namespace scarfsim
