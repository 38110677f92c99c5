#pragma once

// Experiment configuration: a JSON tree (file plus flag overrides) resolved
// into concrete matrices and settings with every default materialised.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "netsync/netsync.hpp"

namespace netsync::cli {

using json = nlohmann::ordered_json;

/// Malformed or inconsistent configuration; maps to exit code 2.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

enum class Command { Topo, H2, Simulate, Lqr, Reproduce };

std::string_view to_string(Command c);

enum class ControllerType { None, Pinning, Lqr };
enum class LqrMethod { Modal, Full };
enum class CsvLayout { Wide, Long };

struct ModelSpec {
  std::string name;  // "chua" or "lure"
  ChuaParams chua;
  LureParams lure;
};

struct TopologySpec {
  TopologyKind kind = TopologyKind::Global;
  Index n = 20;
  int k = 1;
  std::vector<Edge> edges;  // custom only
};

struct ControllerSpec {
  ControllerType type = ControllerType::None;
  Index count = 6;
  double d = 20.0;
  std::uint64_t seed = 1;
  LqrMethod method = LqrMethod::Modal;
  bool simulate = false;  // lqr command: closed-loop cross-check
};

struct OutputSpec {
  std::string dir;  // empty: no files
  std::string prefix = "run";
  CsvLayout layout = CsvLayout::Wide;
  Index stride = 10;
};

struct ExperimentConfig {
  Command command = Command::H2;
  ModelSpec model;
  TopologySpec topology;
  double sigma = 1.0;
  Matrix gamma;
  Matrix b;
  Matrix c;
  Matrix d;
  SimConfig sim;
  ErrorReference error = ErrorReference::Output;
  ControllerSpec controller;
  std::optional<Vector> eta0;
  OutputSpec output;

  NodeModel node_model() const;
  OuterCoupling coupling() const;
  Network network() const;
};

/// Resolves `tree` for `command`. `env_seed` is the NETSYNC_SEED value, used
/// when neither the tree nor a flag sets sim.seed. Throws ConfigError.
ExperimentConfig resolve_config(Command command, const json& tree,
                                const char* env_seed = nullptr);

/// Fully resolved config; resolve_config(to_json(cfg)) reproduces cfg.
json to_json(const ExperimentConfig& cfg);

json matrix_to_json(const Matrix& m);
json vector_to_json(const Vector& v);

/// Reads a JSON document, reporting parse errors as ConfigError.
json read_config_file(const std::string& path);

}  // namespace netsync::cli
