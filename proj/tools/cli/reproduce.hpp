#pragma once

#include <cstdint>
#include <ostream>
#include <string_view>
#include <vector>

#include "config.hpp"

namespace netsync::cli {

struct ReproduceOptions {
  std::uint64_t base_seed = 1;
  int seeds = 10;
};

/// Names accepted by reproduce().
const std::vector<std::string_view>& reproduce_targets();

/// Runs the canonical configuration of `target` and returns the verdict
/// document; "pass" is its overall result. Throws ConfigError for an
/// unknown target.
json reproduce(std::string_view target, const ReproduceOptions& opts);

/// Prints reproduce() and returns 0 on pass, kExitMismatch otherwise.
int cmd_reproduce(std::string_view target, const ReproduceOptions& opts,
                  std::ostream& out);

}  // namespace netsync::cli
