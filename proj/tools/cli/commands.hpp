#pragma once

#include <ostream>
#include <string>

#include "config.hpp"

namespace netsync::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitAssumption = 3;
inline constexpr int kExitDivergence = 4;
inline constexpr int kExitMismatch = 5;

/// Full-network Lyapunov path in `h2` is skipped above this many states.
inline constexpr Index kFullH2MaxStates = 400;

// Each command prints one JSON document to `out` and returns the exit code.
int cmd_topo(const ExperimentConfig& cfg, std::ostream& out);
int cmd_h2(const ExperimentConfig& cfg, std::ostream& out);
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out);
int cmd_lqr(const ExperimentConfig& cfg, std::ostream& out);

/// JSON text as written by every command: two-space indent, trailing newline.
std::string render(const json& j);

/// %.17g, the format used in every CSV file.
std::string format_number(double x);

}  // namespace netsync::cli
