#include "netsync/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>

#include "netsync/error.hpp"

namespace netsync {

void validate(const SimConfig& cfg, Index node_dim) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw InvalidArgument("sim: dt must be positive");
  }
  if (!(cfg.t_final >= cfg.dt) || !std::isfinite(cfg.t_final)) {
    throw InvalidArgument("sim: t_final must be >= dt");
  }
  if (cfg.ic_low.size() != node_dim || cfg.ic_high.size() != node_dim) {
    throw InvalidArgument("sim: ic bounds must have " +
                          std::to_string(node_dim) + " components");
  }
  if ((cfg.ic_low.array() > cfg.ic_high.array()).any()) {
    throw InvalidArgument("sim: ic_low must not exceed ic_high");
  }
  if (cfg.tail_epsilon && !(*cfg.tail_epsilon > 0.0)) {
    throw InvalidArgument("sim: tail_epsilon must be positive");
  }
  if (!(cfg.blowup_threshold > 0.0)) {
    throw InvalidArgument("sim: blowup_threshold must be positive");
  }
}

Vector random_initial_state(Index n_nodes, const SimConfig& cfg) {
  const Index n = cfg.ic_low.size();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector x0(n_nodes * n);
  for (Index i = 0; i < n_nodes; ++i) {
    for (Index k = 0; k < n; ++k) {
      const double lo = cfg.ic_low[k];
      const double hi = cfg.ic_high[k];
      x0[i * n + k] = lo + (hi - lo) * unit(rng);
    }
  }
  return x0;
}

Controller::Controller(Law law, Matrix input_matrix)
    : law_(std::move(law)), input_matrix_(std::move(input_matrix)) {}

void Controller::control(const Vector& eta, Index n_nodes, Vector& u) const {
  const Index m = input_dim();
  u.resize(n_nodes * m);
  if (const auto* lf = std::get_if<LinearFeedback>(&law_)) {
    u.noalias() = lf->gain * eta;
    return;
  }
  const auto& pf = std::get<PinningFeedback>(law_);
  const Index n = pf.gamma.rows();
  u.setZero();
  const double k = -pf.sigma * pf.d;
  for (Index i : pf.pinned) {
    u.segment(i * m, m).noalias() = k * pf.gamma * eta.segment(i * n, n);
  }
}

Controller pinning_controller(std::vector<Index> pinned, double sigma, double d,
                              const Matrix& gamma, Index n_nodes) {
  if (pinned.empty()) throw InvalidArgument("pinning: empty pinned set");
  if (!(d > 0.0)) throw InvalidArgument("pinning: d must be positive");
  if (gamma.rows() != gamma.cols() || gamma.rows() == 0) {
    throw InvalidArgument("pinning: gamma must be square");
  }
  std::sort(pinned.begin(), pinned.end());
  if (std::adjacent_find(pinned.begin(), pinned.end()) != pinned.end()) {
    throw InvalidArgument("pinning: duplicate node in pinned set");
  }
  if (pinned.front() < 0 || (n_nodes > 0 && pinned.back() >= n_nodes)) {
    throw InvalidArgument("pinning: node index out of range");
  }
  return Controller(PinningFeedback{std::move(pinned), sigma, d, gamma},
                    identity(gamma.rows()));
}

Controller linear_feedback(Matrix gain, Matrix input_matrix) {
  return Controller(LinearFeedback{std::move(gain)}, std::move(input_matrix));
}

std::vector<Index> sample_pinned_nodes(Index n_nodes, Index count,
                                       std::uint64_t seed) {
  if (count < 1 || count > n_nodes) {
    throw InvalidArgument("pinning: need 1 <= count <= N");
  }
  std::vector<Index> nodes(static_cast<std::size_t>(n_nodes));
  std::iota(nodes.begin(), nodes.end(), Index{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates.
  for (Index i = 0; i < count; ++i) {
    std::uniform_int_distribution<Index> pick(i, n_nodes - 1);
    std::swap(nodes[static_cast<std::size_t>(i)],
              nodes[static_cast<std::size_t>(pick(rng))]);
  }
  nodes.resize(static_cast<std::size_t>(count));
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

namespace {

class NetworkRhs {
 public:
  NetworkRhs(const Network& net, const IntegrateOptions& opts, Vector s_stack)
      : net_(net),
        opts_(opts),
        n_(net.node_dim()),
        n_nodes_(net.n_nodes()),
        sigma_gamma_(net.sigma * net.gamma),
        coupling_t_(net.coupling.matrix().transpose()),
        s_stack_(std::move(s_stack)) {
    work_.resize(n_, n_nodes_);
  }

  // dx = F(x); u receives the control used (if any).
  void operator()(const Vector& x, Vector& dx, Vector& u) {
    dx.resize(x.size());
    for (Index i = 0; i < n_nodes_; ++i) {
      net_.model.eval(x.segment(i * n_, n_), dx.segment(i * n_, n_));
    }
    const Eigen::Map<const Matrix> xm(x.data(), n_, n_nodes_);
    Eigen::Map<Matrix> dxm(dx.data(), n_, n_nodes_);
    work_.noalias() = xm * coupling_t_;
    dxm.noalias() -= sigma_gamma_ * work_;
    if (opts_.controller) {
      eta_ = x - s_stack_;
      opts_.controller->control(eta_, n_nodes_, u);
      const Index m = opts_.controller->input_dim();
      const Eigen::Map<const Matrix> um(u.data(), m, n_nodes_);
      dxm.noalias() += opts_.controller->input_matrix() * um;
    }
  }

 private:
  const Network& net_;
  const IntegrateOptions& opts_;
  Index n_;
  Index n_nodes_;
  Matrix sigma_gamma_;
  Matrix coupling_t_;
  Vector s_stack_;
  Matrix work_;
  Vector eta_;
};

double error_density(ErrorReference ref, const Vector& x, const Vector& y,
                     const Vector& s_stack, Index n, Index n_nodes) {
  switch (ref) {
    case ErrorReference::NodeOne: {
      double acc = 0.0;
      const auto x1 = x.head(n);
      for (Index i = 1; i < n_nodes; ++i) {
        acc += (x.segment(i * n, n) - x1).squaredNorm();
      }
      return acc;
    }
    case ErrorReference::Equilibrium:
      return (x - s_stack).squaredNorm();
    case ErrorReference::Output:
      return y.squaredNorm();
  }
  return 0.0;
}

}  // namespace

Trajectory integrate(const Network& net, const Vector& x0,
                     const SimConfig& cfg, const IntegrateOptions& opts) {
  const Index n = net.node_dim();
  const Index n_nodes = net.n_nodes();
  const Index dim = n * n_nodes;
  if (x0.size() != dim) {
    throw InvalidArgument("integrate: x0 has " + std::to_string(x0.size()) +
                          " entries, expected " + std::to_string(dim));
  }
  if (!(cfg.dt > 0.0) || !(cfg.t_final >= cfg.dt)) {
    throw InvalidArgument("integrate: need dt > 0 and t_final >= dt");
  }
  Vector s = opts.equilibrium.size() ? opts.equilibrium : Vector::Zero(n);
  if (s.size() != n) {
    throw InvalidArgument("integrate: equilibrium has wrong dimension");
  }
  const Vector s_stack = s.replicate(n_nodes, 1);

  Index m = 0;
  if (opts.controller) {
    m = opts.controller->input_dim();
    if (opts.controller->input_matrix().rows() != n) {
      throw InvalidArgument("integrate: controller B must have n rows");
    }
    if (const auto* lf =
            std::get_if<LinearFeedback>(&opts.controller->law())) {
      if (lf->gain.rows() != n_nodes * m || lf->gain.cols() != dim) {
        throw InvalidArgument("integrate: feedback gain has wrong shape");
      }
    }
  }
  Index l = 0;
  if (opts.output) {
    l = opts.output->c.rows();
    if (opts.output->c.cols() != n) {
      throw InvalidArgument("integrate: output C must have n columns");
    }
    if (opts.controller && opts.output->d.size() &&
        (opts.output->d.rows() != l || opts.output->d.cols() != m)) {
      throw InvalidArgument("integrate: output D has wrong shape");
    }
  }
  if (opts.tail_signal == ErrorReference::Output && !opts.output &&
      cfg.tail_epsilon) {
    throw InvalidArgument("integrate: output tail monitor needs an output map");
  }

  const auto steps = static_cast<Index>(std::llround(cfg.t_final / cfg.dt));
  Trajectory traj;
  traj.n_nodes = n_nodes;
  traj.node_dim = n;
  traj.dt = cfg.dt;
  traj.times.resize(steps + 1);
  traj.states.resize(dim, steps + 1);
  if (opts.output) traj.outputs.resize(n_nodes * l, steps + 1);
  if (opts.controller) traj.controls.resize(n_nodes * m, steps + 1);

  NetworkRhs rhs(net, opts, s_stack);
  Vector x = x0;
  Vector k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim), u, u_scratch, y;
  Vector cumulative(steps + 1);
  double prev_density = 0.0;

  // Tail check cadence: every 1% of the horizon once 10% has elapsed.
  const Index check_every = std::max<Index>(1, steps / 100);
  const Index first_check = std::max<Index>(1, steps / 10);

  auto record = [&](Index k, const Vector& state) {
    traj.times[k] = static_cast<double>(k) * cfg.dt;
    traj.states.col(k) = state;
    if (opts.controller) {
      opts.controller->control(state - s_stack, n_nodes, u);
      traj.controls.col(k) = u;
    }
    if (opts.output) {
      y.resize(n_nodes * l);
      for (Index i = 0; i < n_nodes; ++i) {
        y.segment(i * l, l).noalias() =
            opts.output->c * (state.segment(i * n, n) - s);
        if (opts.controller && opts.output->d.size()) {
          y.segment(i * l, l).noalias() +=
              opts.output->d * u.segment(i * m, m);
        }
      }
      traj.outputs.col(k) = y;
    }
    const double density =
        error_density(opts.tail_signal, state, y, s_stack, n, n_nodes);
    cumulative[k] = k == 0 ? 0.0
                           : cumulative[k - 1] +
                                 0.5 * cfg.dt * (prev_density + density);
    prev_density = density;
  };

  auto finite_and_bounded = [&](const Vector& v) {
    return v.allFinite() && v.cwiseAbs().maxCoeff() <= cfg.blowup_threshold;
  };

  if (!finite_and_bounded(x)) {
    throw InvalidArgument("integrate: initial state exceeds blowup threshold");
  }
  record(0, x);
  const double h = cfg.dt;
  Index last = steps;
  for (Index k = 0; k < steps; ++k) {
    rhs(x, k1, u_scratch);
    tmp = x + (0.5 * h) * k1;
    rhs(tmp, k2, u_scratch);
    tmp = x + (0.5 * h) * k2;
    rhs(tmp, k3, u_scratch);
    tmp = x + h * k3;
    rhs(tmp, k4, u_scratch);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!finite_and_bounded(x)) {
      traj.blowup_time = static_cast<double>(k + 1) * h;
      last = k;
      break;
    }
    record(k + 1, x);

    const Index done = k + 1;
    if (cfg.tail_epsilon && done >= first_check && done % check_every == 0 &&
        done < steps) {
      const auto window_start = static_cast<Index>(
          std::floor(0.9 * static_cast<double>(done)));
      const double total = cumulative[done];
      const double window = total - cumulative[window_start];
      if (window <= *cfg.tail_epsilon * total) {
        traj.tail_fired = true;
        last = done;
        break;
      }
    }
  }

  if (last < steps) {
    const Index keep = last + 1;
    traj.times.conservativeResize(keep);
    traj.states.conservativeResize(Eigen::NoChange, keep);
    if (opts.output) traj.outputs.conservativeResize(Eigen::NoChange, keep);
    if (opts.controller) {
      traj.controls.conservativeResize(Eigen::NoChange, keep);
    }
  }
  return traj;
}

double l2_quadrature_squared_norms(const Vector& sq, double dt) {
  if (sq.size() < 2) return 0.0;
  const double interior = sq.segment(1, sq.size() - 2).sum();
  const double energy = dt * (interior + 0.5 * (sq[0] + sq[sq.size() - 1]));
  return std::sqrt(std::max(0.0, energy));
}

double l2_quadrature(const Matrix& e, double dt) {
  return l2_quadrature_squared_norms(e.colwise().squaredNorm().transpose(), dt);
}

Vector ErrorSignal::cumulative_l2() const {
  const Vector sq = e.colwise().squaredNorm().transpose();
  Vector out(sq.size());
  double acc = 0.0;
  for (Index k = 0; k < sq.size(); ++k) {
    if (k > 0) acc += 0.5 * dt * (sq[k - 1] + sq[k]);
    out[k] = std::sqrt(acc);
  }
  return out;
}

ErrorSignal error_to_node1(const Trajectory& traj) {
  const Index n = traj.node_dim;
  ErrorSignal sig;
  sig.times = traj.times;
  sig.dt = traj.dt;
  sig.e.resize(traj.states.rows(), traj.states.cols());
  for (Index i = 0; i < traj.n_nodes; ++i) {
    sig.e.middleRows(i * n, n) =
        traj.states.middleRows(i * n, n) - traj.states.topRows(n);
  }
  sig.l2 = l2_quadrature(sig.e, sig.dt);
  return sig;
}

ErrorSignal error_to_equilibrium(const Trajectory& traj, const Vector& s) {
  const Index n = traj.node_dim;
  if (s.size() != n) {
    throw InvalidArgument("error_to_equilibrium: s has wrong dimension");
  }
  ErrorSignal sig;
  sig.times = traj.times;
  sig.dt = traj.dt;
  sig.e = traj.states;
  for (Index i = 0; i < traj.n_nodes; ++i) {
    sig.e.middleRows(i * n, n).colwise() -= s;
  }
  sig.l2 = l2_quadrature(sig.e, sig.dt);
  return sig;
}

ErrorSignal output_error(const Trajectory& traj) {
  if (traj.outputs.size() == 0) {
    throw InvalidArgument("output_error: trajectory has no outputs");
  }
  ErrorSignal sig;
  sig.times = traj.times;
  sig.dt = traj.dt;
  sig.e = traj.outputs;
  sig.l2 = l2_quadrature(sig.e, sig.dt);
  return sig;
}

}  // namespace netsync
