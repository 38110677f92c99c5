#pragma once

#include <ostream>

namespace netsync::cli {

/// Entry point shared by the executable and the tests. Reads NETSYNC_SEED
/// from the environment; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace netsync::cli
