#include "reproduce.hpp"

#include <cmath>
#include <sstream>

#include "commands.hpp"

namespace netsync::cli {

namespace {

constexpr double kValueTolerance = 1e-3;     // relative, printed 4-digit values
constexpr double kPathAgreement = 1e-7;      // modal vs full Lyapunov
constexpr Index kLyapunovPathMaxNodes = 80;  // full Lyapunov path in table4

json entry(const std::string& label, double expected, double computed, double tol) {
  const double rel = std::abs(computed - expected) / std::abs(expected);
  return {{"label", label},
          {"expected", expected},
          {"computed", computed},
          {"relative_error", rel},
          {"tolerance", tol},
          {"pass", rel <= tol}};
}

std::vector<ModalSystem> lure_modes(const ExperimentConfig& cfg, LinearizedNetwork* lin_out) {
  const Network net = cfg.network();
  auto lin = assemble_linearization(net, {Vector::Zero(2)}, cfg.b, cfg.c,
                                    Matrix::Zero(cfg.c.rows(), cfg.b.cols()));
  auto modes = modal_decompose(lin, net.coupling);
  if (lin_out) *lin_out = std::move(lin);
  return modes;
}

ExperimentConfig lure_config(TopologyKind kind, Index n, double sigma) {
  json tree = {{"model", "lure"},
               {"topology", {{"kind", std::string(to_string(kind))}, {"n", n}}},
               {"sigma", sigma}};
  return resolve_config(Command::H2, tree);
}

json table3() {
  json entries = json::array();
  json agreement = json::array();
  bool pass = true;
  const std::pair<TopologyKind, double> cases[] = {
      {TopologyKind::Ring, 2.5091}, {TopologyKind::Star, 2.4383}, {TopologyKind::Global, 1.2565}};
  for (const auto& [kind, expected] : cases) {
    const auto cfg = lure_config(kind, 20, 2.0);
    LinearizedNetwork lin;
    const auto modes = lure_modes(cfg, &lin);
    const double modal = h2_modal(modes).value;
    const double full = h2_norm(lin.a_c, lin.b_c, lin.c_c).value;
    const std::string label(to_string(kind));
    entries.push_back(entry(label, expected, modal, kValueTolerance));
    const double rel = std::abs(modal - full) / full;
    agreement.push_back({{"label", label},
                         {"modal", modal},
                         {"full", full},
                         {"relative_difference", rel},
                         {"tolerance", kPathAgreement},
                         {"pass", rel <= kPathAgreement}});
    pass = pass && entries.back()["pass"].get<bool>() && rel <= kPathAgreement;
  }
  return {{"target", "table3"},
          {"sigma", 2.0},
          {"n_nodes", 20},
          {"entries", std::move(entries)},
          {"modal_vs_full", std::move(agreement)},
          {"pass", pass}};
}

json table4() {
  const LureParams p;
  const double sigma = 1.0;
  json entries = json::array();
  json lyapunov = json::array();
  bool pass = true;

  auto add = [&](const std::string& label, TopologyKind kind, Index n, double expected) {
    const OuterCoupling coupling = n == 1 ? OuterCoupling::from_matrix(Matrix::Zero(1, 1))
                                          : build_topology(kind, n);
    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
      sum += lure_h2_closed_form(p, sigma, coupling.eigenvalues()[i]);
    }
    const double closed = std::sqrt(sum);
    entries.push_back(entry(label, expected, closed, kValueTolerance));
    pass = pass && entries.back()["pass"].get<bool>();
    if (n <= kLyapunovPathMaxNodes) {
      const Network net = make_network(NodeModel::lure(p), coupling, sigma);
      const auto lin = assemble_linearization(net, {Vector::Zero(2)}, identity(2),
                                              p.c1_row(), Matrix::Zero(1, 2));
      const double full = h2_norm(lin.a_c, lin.b_c, lin.c_c).value;
      json e = entry(label, expected, full, kValueTolerance);
      e["closed_form_vs_lyapunov_relative"] = std::abs(full - closed) / closed;
      pass = pass && e["pass"].get<bool>();
      lyapunov.push_back(std::move(e));
    }
  };
  add("N=1 global", TopologyKind::Global, 1, 1.0801);
  add("N=1 star", TopologyKind::Star, 1, 1.0801);
  add("global N=10", TopologyKind::Global, 10, 1.3190);
  add("global N=100", TopologyKind::Global, 100, 1.4492);
  add("global N=1000", TopologyKind::Global, 1000, 1.4696);
  add("star N=10", TopologyKind::Star, 10, 2.2619);
  add("star N=100", TopologyKind::Star, 100, 6.9840);
  add("star N=1000", TopologyKind::Star, 1000, 22.0434);

  json limit = {
      {"label", "global N -> infinity"},
      {"computed_limit", lure_global_h2_limit(p, sigma)},
      {"printed", 1.2910},
      {"note",
       "excluded from pass/fail: the printed value is sqrt(5/3), below the finite-N "
       "entries it should bound; the computed limit of the same sum is sqrt(13/6)"}};
  return {{"target", "table4"},
          {"sigma", sigma},
          {"entries", std::move(entries)},
          {"lyapunov_path", std::move(lyapunov)},
          {"limit", std::move(limit)},
          {"pass", pass}};
}

json theorem1() {
  json cases = json::array();
  bool pass = true;
  for (auto kind : {TopologyKind::Ring, TopologyKind::Star, TopologyKind::Global}) {
    for (Index n : {5, 10, 20}) {
      for (double k : {0.5, 1.0, 2.0}) {
        json tree = {{"model", "lure"},
                     {"topology", {{"kind", std::string(to_string(kind))}, {"n", n}}},
                     {"sigma", 1.0},
                     {"gamma", k}};
        const auto cfg = resolve_config(Command::H2, tree);
        const auto r = theorem1_report(lure_modes(cfg, nullptr));
        cases.push_back({{"topology", std::string(to_string(kind))},
                         {"n", n},
                         {"gamma_scale", k},
                         {"applicable", r.applicable},
                         {"violations", r.monotonicity_violations},
                         {"worst_margin", r.worst_monotonicity_margin},
                         {"lower_chain_holds", r.lower_chain_holds},
                         {"upper_chain_holds", r.upper_chain_holds},
                         {"pass", r.holds()}});
        pass = pass && r.holds();
      }
    }
  }
  return {{"target", "theorem1"}, {"sigma", 1.0}, {"cases", std::move(cases)}, {"pass", pass}};
}

double open_loop_l2(const ExperimentConfig& cfg) {
  IntegrateOptions opts;
  opts.equilibrium = Vector::Zero(cfg.b.rows());
  opts.tail_signal = cfg.error;
  if (cfg.error == ErrorReference::Output) opts.output = OutputMap{cfg.c, {}};
  const Network net = cfg.network();
  const auto traj =
      integrate(net, random_initial_state(cfg.topology.n, cfg.sim), cfg.sim, opts);
  if (traj.diverged()) throw NumericalError("simulation diverged");
  return cfg.error == ErrorReference::NodeOne ? error_to_node1(traj).l2
                                              : output_error(traj).l2;
}

json topology_ordering(const std::string& target, const std::string& model, double sigma,
                       const std::string& error, const ReproduceOptions& opts,
                       int required) {
  json runs = json::array();
  int satisfied = 0;
  for (int k = 0; k < opts.seeds; ++k) {
    const std::uint64_t seed = opts.base_seed + static_cast<std::uint64_t>(k);
    json l2;
    double values[3];
    int idx = 0;
    for (const char* kind : {"ring", "star", "global"}) {
      json tree = {{"model", model},
                   {"topology", {{"kind", kind}, {"n", 20}}},
                   {"sigma", sigma},
                   {"error", error},
                   {"sim", {{"seed", seed}}}};
      values[idx] = open_loop_l2(resolve_config(Command::Simulate, tree));
      l2[kind] = values[idx];
      ++idx;
    }
    const bool ordered = values[0] > values[1] && values[1] > values[2];
    satisfied += ordered ? 1 : 0;
    runs.push_back({{"seed", seed}, {"l2", std::move(l2)}, {"ordered", ordered}});
  }
  json canonical = {{"model", model},
                    {"topology", {{"kind", "global"}, {"n", 20}}},
                    {"sigma", sigma},
                    {"error", error},
                    {"sim", {{"seed", opts.base_seed}}}};
  return {{"target", target},
          {"ordering", "ring > star > global"},
          {"sigma", sigma},
          {"config", to_json(resolve_config(Command::Simulate, canonical))},
          {"runs", std::move(runs)},
          {"satisfied", satisfied},
          {"required", required},
          {"pass", satisfied >= required}};
}

json table5(const ReproduceOptions& opts) {
  json runs = json::array();
  int satisfied = 0;
  for (int k = 0; k < opts.seeds; ++k) {
    const std::uint64_t seed = opts.base_seed + static_cast<std::uint64_t>(k);
    json base = {{"model", "chua"},
                 {"topology", {{"kind", "global"}, {"n", 20}}},
                 {"sigma", 1.0},
                 {"error", "output"},
                 {"sim", {{"seed", seed}, {"t_final", 20.0}}}};
    json lqr_tree = base;
    lqr_tree["controller"] = {{"type", "lqr"}, {"method", "modal"}};
    json pin_tree = base;
    pin_tree["controller"] = {{"type", "pinning"}, {"count", 6}, {"d", 20.0}};
    double values[2];
    int idx = 0;
    for (const json* tree : {&lqr_tree, &pin_tree}) {
      const auto cfg = resolve_config(Command::Simulate, *tree);
      std::ostringstream text;
      const int code = cmd_simulate(cfg, text);
      const json out = json::parse(text.str());
      if (code != kExitOk) {
        throw NumericalError("table5 run failed: " + out.value("error", json()).dump());
      }
      values[idx++] = out["result"]["l2"].get<double>();
    }
    const bool ordered = values[0] < values[1];
    satisfied += ordered ? 1 : 0;
    runs.push_back({{"seed", seed},
                    {"lqr", values[0]},
                    {"pinning", values[1]},
                    {"ordered", ordered}});
  }
  return {{"target", "table5-ordering"},
          {"ordering", "lqr < pinning (6 nodes, d = 20)"},
          {"sigma", 1.0},
          {"runs", std::move(runs)},
          {"satisfied", satisfied},
          {"required", opts.seeds},
          {"pass", satisfied == opts.seeds}};
}

}  // namespace

const std::vector<std::string_view>& reproduce_targets() {
  static const std::vector<std::string_view> targets{
      "table3", "table4", "theorem1", "table1-ordering", "table2-ordering",
      "table5-ordering"};
  return targets;
}

json reproduce(std::string_view target, const ReproduceOptions& opts) {
  if (opts.seeds < 1) throw ConfigError("seeds must be positive");
  const int most = opts.seeds - opts.seeds / 10;  // 9 of 10
  if (target == "table3") return table3();
  if (target == "table4") return table4();
  if (target == "theorem1") return theorem1();
  if (target == "table1-ordering") {
    return topology_ordering("table1-ordering", "chua", 6.0, "node1", opts, most);
  }
  if (target == "table2-ordering") {
    return topology_ordering("table2-ordering", "lure", 2.0, "output", opts, most);
  }
  if (target == "table5-ordering") return table5(opts);
  throw ConfigError("unknown reproduce target '" + std::string(target) + "'");
}

int cmd_reproduce(std::string_view target, const ReproduceOptions& opts, std::ostream& out) {
  json verdict = reproduce(target, opts);
  const bool pass = verdict["pass"].get<bool>();
  verdict["exit_code"] = pass ? kExitOk : kExitMismatch;
  out << render(verdict);
  return pass ? kExitOk : kExitMismatch;
}

}  // namespace netsync::cli
