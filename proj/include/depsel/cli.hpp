#pragma once

#include <ostream>

namespace depsel {

/// Entry point of the `depsel` tool. Returns the process exit code:
/// 0 success, 2 configuration or input error, 3 numeric or runtime failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace depsel
