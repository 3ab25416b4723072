#pragma once
#include <iosfwd>

namespace dynrank::cli {

// Full command-line front end (stats, run, bench, scale, gen-batch).
// Returns the process exit status: 0 on success, 1 on I/O or parse errors,
// 2 on contract violations. Output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace dynrank::cli
