#pragma once

#include <string>
#include <vector>

namespace slqg {

// Entry point behind the `slqg` binary; also callable from tests.
// Subcommands: solve, simulate, check, verify, demo-inconsistency,
// reproduce-table2. Returns a process exit code (0 success, 2 validation,
// 3 singularity, 4 monitor/simulation breach, 5 io, 64 usage).
int cli_dispatch(const std::vector<std::string>& args);
int cli_dispatch(int argc, char** argv);

}  // namespace slqg
