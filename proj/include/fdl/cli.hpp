#pragma once

#include <iosfwd>

namespace fdl {

/// Entry point of the `fdl` tool. Returns 0 on success, 1 on a usage error
/// and 2 when a pipeline step fails (including a failed grad-check).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fdl
