#include "app.hpp"

#include <cstdlib>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "reproduce.hpp"

namespace netsync::cli {

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> model;
  std::optional<std::string> kind;
  std::optional<Index> n;
  std::optional<int> k;
  std::optional<double> sigma;
  std::optional<double> gamma;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<std::string> tail_epsilon;
  std::optional<std::string> error;
  std::optional<std::string> controller;
  std::optional<Index> pinned;
  std::optional<double> pin_d;
  std::optional<std::string> lqr_method;
  bool simulate = false;
  std::optional<std::string> out_dir;
  std::optional<std::string> prefix;
  std::optional<std::string> csv;
  std::optional<Index> stride;
};

void add_topology_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file");
  cmd->add_option("--kind", o.kind, "ring | star | global | custom");
  cmd->add_option("--n", o.n, "number of nodes");
  cmd->add_option("--k", o.k, "ring neighbours on each side");
  cmd->add_option("--out-dir", o.out_dir, "directory for report and CSV files");
  cmd->add_option("--prefix", o.prefix, "file name stem inside --out-dir");
}

void add_model_flags(CLI::App* cmd, Overrides& o) {
  add_topology_flags(cmd, o);
  cmd->add_option("--model", o.model, "chua | lure");
  cmd->add_option("--sigma", o.sigma, "coupling strength");
  cmd->add_option("--gamma", o.gamma, "inner coupling k (Gamma = k I)");
  cmd->add_option("--seed", o.seed, "seed for initial states and pinned nodes");
  cmd->add_option("--dt", o.dt, "RK4 step");
  cmd->add_option("--t-final", o.t_final, "horizon");
  cmd->add_option("--tail-epsilon", o.tail_epsilon, "early-stop ratio, or 'off'");
  cmd->add_option("--error", o.error, "node1 | equilibrium | output");
}

void add_control_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--controller", o.controller, "none | pinning | lqr");
  cmd->add_option("--pinned", o.pinned, "number of pinned nodes");
  cmd->add_option("--pin-d", o.pin_d, "pinning gain d");
  cmd->add_option("--lqr-method", o.lqr_method, "modal | full");
  cmd->add_option("--csv", o.csv, "wide | long");
  cmd->add_option("--stride", o.stride, "write every k-th sample");
}

json build_tree(const Overrides& o) {
  json tree = o.config.empty() ? json::object() : read_config_file(o.config);
  if (!tree.is_object()) throw ConfigError("config root must be an object");
  auto sub = [&](const char* key) -> json& {
    if (!tree.contains(key) || tree[key].is_null()) tree[key] = json::object();
    if (!tree[key].is_object()) throw ConfigError(std::string(key) + ": expected an object");
    return tree[key];
  };
  if (o.model) tree["model"] = *o.model;
  if (o.kind) sub("topology")["kind"] = *o.kind;
  if (o.n) sub("topology")["n"] = *o.n;
  if (o.k) sub("topology")["k"] = *o.k;
  if (o.sigma) tree["sigma"] = *o.sigma;
  if (o.gamma) tree["gamma"] = *o.gamma;
  if (o.seed) sub("sim")["seed"] = *o.seed;
  if (o.dt) sub("sim")["dt"] = *o.dt;
  if (o.t_final) sub("sim")["t_final"] = *o.t_final;
  if (o.tail_epsilon) {
    if (*o.tail_epsilon == "off") {
      sub("sim")["tail_epsilon"] = nullptr;
    } else {
      try {
        std::size_t used = 0;
        const double v = std::stod(*o.tail_epsilon, &used);
        if (used != o.tail_epsilon->size()) throw std::invalid_argument("trailing");
        sub("sim")["tail_epsilon"] = v;
      } catch (const std::exception&) {
        throw ConfigError("--tail-epsilon: expected a number or 'off'");
      }
    }
  }
  if (o.error) tree["error"] = *o.error;
  if (o.controller) sub("controller")["type"] = *o.controller;
  if (o.pinned) sub("controller")["count"] = *o.pinned;
  if (o.pin_d) sub("controller")["d"] = *o.pin_d;
  if (o.lqr_method) sub("controller")["method"] = *o.lqr_method;
  if (o.simulate) sub("controller")["simulate"] = true;
  if (o.out_dir) sub("output")["dir"] = *o.out_dir;
  if (o.prefix) sub("output")["prefix"] = *o.prefix;
  if (o.csv) sub("output")["csv"] = *o.csv;
  if (o.stride) sub("output")["stride"] = *o.stride;
  return tree;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synchronisation analysis of coupled oscillator networks", "netsync"};
  app.require_subcommand(1);

  Overrides topo_o, h2_o, sim_o, lqr_o;
  auto* topo = app.add_subcommand("topo", "coupling matrix, spectrum and validity report");
  add_topology_flags(topo, topo_o);
  auto* h2 = app.add_subcommand("h2", "H2 norm of the linearised network");
  add_model_flags(h2, h2_o);
  auto* simulate = app.add_subcommand("simulate", "integrate the nonlinear network");
  add_model_flags(simulate, sim_o);
  add_control_flags(simulate, sim_o);
  auto* lqr = app.add_subcommand("lqr", "LQR gain synthesis and minimised output norm");
  add_model_flags(lqr, lqr_o);
  add_control_flags(lqr, lqr_o);
  lqr->add_flag("--simulate", lqr_o.simulate, "also simulate the nonlinear closed loop");

  std::string target;
  std::optional<std::uint64_t> repro_seed;
  int seeds = 10;
  auto* repro = app.add_subcommand("reproduce", "rerun a reference experiment and compare");
  repro->add_option("target", target, "reference experiment")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(reproduce_targets().begin(),
                                                     reproduce_targets().end())));
  repro->add_option("--seed", repro_seed, "first seed of the sweep");
  repro->add_option("--seeds", seeds, "number of seeds for ordering targets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const char* env_seed = std::getenv("NETSYNC_SEED");
  try {
    if (topo->parsed()) {
      return cmd_topo(resolve_config(Command::Topo, build_tree(topo_o), env_seed), out);
    }
    if (h2->parsed()) {
      return cmd_h2(resolve_config(Command::H2, build_tree(h2_o), env_seed), out);
    }
    if (simulate->parsed()) {
      return cmd_simulate(resolve_config(Command::Simulate, build_tree(sim_o), env_seed),
                          out);
    }
    if (lqr->parsed()) {
      return cmd_lqr(resolve_config(Command::Lqr, build_tree(lqr_o), env_seed), out);
    }
    ReproduceOptions opts;
    opts.seeds = seeds;
    if (repro_seed) {
      opts.base_seed = *repro_seed;
    } else if (env_seed && *env_seed) {
      opts.base_seed = resolve_config(Command::Reproduce, json::object(), env_seed).sim.seed;
    }
    return cmd_reproduce(target, opts, out);
  } catch (const AssumptionError& e) {
    err << "netsync: assumption failure: " << e.what() << "\n";
    return kExitAssumption;
  } catch (const UnstableError& e) {
    err << "netsync: stability failure: " << e.what() << "\n";
    return kExitAssumption;
  } catch (const NumericalError& e) {
    err << "netsync: numerical failure: " << e.what() << "\n";
    return kExitAssumption;
  } catch (const InvalidArgument& e) {
    err << "netsync: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "netsync: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace netsync::cli
