#pragma once

// Fixed-step RK4 simulation of the nonlinear network, optionally under
// state feedback, and the L2 error index.

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "netsync/matrix.hpp"
#include "netsync/netmodel.hpp"

namespace netsync {

struct SimConfig {
  double dt = 1e-3;
  double t_final = 20.0;
  std::uint64_t seed = 1;
  /// Per-component bounds of the uniform initial state (node dimension).
  Vector ic_low;
  Vector ic_high;
  /// Stop early once the error energy in the trailing 10% of the elapsed
  /// time is below tail_epsilon times the total.
  std::optional<double> tail_epsilon;
  double blowup_threshold = 1e6;
};

void validate(const SimConfig& cfg, Index node_dim);

/// Seeded draw of x0, node-major, uniform on [ic_low, ic_high] per component.
Vector random_initial_state(Index n_nodes, const SimConfig& cfg);

/// u = F (x - 1 (x) s).
struct LinearFeedback {
  Matrix gain;  // (N m) x (N n)
};

/// u_i = -sigma * d * Gamma (x_i - s) for pinned i, zero otherwise.
struct PinningFeedback {
  std::vector<Index> pinned;  // zero-based, sorted
  double sigma = 1.0;
  double d = 20.0;
  Matrix gamma;
};

class Controller {
 public:
  using Law = std::variant<LinearFeedback, PinningFeedback>;

  Controller(Law law, Matrix input_matrix);

  const Law& law() const { return law_; }
  /// Node-level B (n x m).
  const Matrix& input_matrix() const { return input_matrix_; }
  Index input_dim() const { return input_matrix_.cols(); }

  /// Stacked control for the stacked state error eta = x - 1 (x) s.
  void control(const Vector& eta, Index n_nodes, Vector& u) const;

 private:
  Law law_;
  Matrix input_matrix_;
};

/// Pinning feedback with B = I_n. Throws on an empty set, d <= 0 or a
/// node index outside [0, n_nodes) when n_nodes > 0.
Controller pinning_controller(std::vector<Index> pinned, double sigma, double d,
                              const Matrix& gamma, Index n_nodes = 0);

Controller linear_feedback(Matrix gain, Matrix input_matrix);

/// Seeded uniform sample of `count` distinct nodes out of n_nodes, sorted.
std::vector<Index> sample_pinned_nodes(Index n_nodes, Index count,
                                       std::uint64_t seed);

/// y_i = C (x_i - s) + D u_i.
struct OutputMap {
  Matrix c;
  Matrix d;  // may be empty when there is no controller
};

enum class ErrorReference {
  NodeOne,      // e_i = x_i - x_1
  Equilibrium,  // e_i = x_i - s
  Output,       // e = y (requires an output map)
};

struct IntegrateOptions {
  std::optional<Controller> controller;
  std::optional<OutputMap> output;
  /// Equilibrium s used by the feedback, the outputs and the error; zero
  /// when empty.
  Vector equilibrium;
  /// Signal monitored by the tail criterion.
  ErrorReference tail_signal = ErrorReference::NodeOne;
};

/// Samples on the uniform grid t_k = k dt. Columns are time samples.
struct Trajectory {
  Index n_nodes = 0;
  Index node_dim = 0;
  double dt = 0.0;
  Vector times;
  Matrix states;    // (N n) x K
  Matrix outputs;   // (N l) x K, empty without an output map
  Matrix controls;  // (N m) x K, empty without a controller
  bool tail_fired = false;
  std::optional<double> blowup_time;

  bool diverged() const { return blowup_time.has_value(); }
  Index samples() const { return times.size(); }
  double t_end() const { return times.size() ? times[times.size() - 1] : 0.0; }
};

/// Classical RK4 with fixed step; controls are evaluated at every stage.
/// Divergence (|x_k| > blowup_threshold or non-finite) stops the run and
/// returns the partial trajectory with blowup_time set.
Trajectory integrate(const Network& net, const Vector& x0,
                     const SimConfig& cfg, const IntegrateOptions& opts = {});

struct ErrorSignal {
  Vector times;
  Matrix e;  // stacked error per column
  double dt = 0.0;
  double l2 = 0.0;

  /// sqrt of the running trapezoidal energy, one entry per sample.
  Vector cumulative_l2() const;
};

/// Trapezoidal rule on ||e(t_k)||^2 followed by a square root.
double l2_quadrature(const Matrix& e, double dt);
double l2_quadrature_squared_norms(const Vector& squared_norms, double dt);

ErrorSignal error_to_node1(const Trajectory& traj);
ErrorSignal error_to_equilibrium(const Trajectory& traj, const Vector& s);
/// e = y, the recorded outputs.
ErrorSignal output_error(const Trajectory& traj);

}  // namespace netsync
