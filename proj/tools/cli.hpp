#pragma once

#include <ostream>

namespace sastbench::cli {

/// Runs one command line. Exit codes: 0 success, 1 domain error, 2 usage.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sastbench::cli
