#pragma once

#include <ostream>

namespace sketchreg {

/// Entry point of the `sketchreg` tool (gen, solve, bench, diag).
/// Returns 0 on success, 2 on input errors and 3 on numerical failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sketchreg
