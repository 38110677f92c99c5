#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>

namespace netsync::cli {

namespace {

json header(const ExperimentConfig& cfg) {
  json j;
  j["command"] = std::string(to_string(cfg.command));
  j["config"] = to_json(cfg);
  return j;
}

std::string output_path(const ExperimentConfig& cfg, std::string_view suffix) {
  std::filesystem::create_directories(cfg.output.dir);
  return (std::filesystem::path(cfg.output.dir) /
          (cfg.output.prefix + std::string(suffix)))
      .string();
}

int emit(const ExperimentConfig& cfg, json report, std::ostream& out, int code) {
  report["exit_code"] = code;
  const std::string text = render(report);
  if (!cfg.output.dir.empty()) {
    write_file_atomic(output_path(cfg, "_report.json"), text);
  }
  out << text;
  return code;
}

Equilibrium origin(const ExperimentConfig& cfg) {
  return {Vector::Zero(cfg.model.name == "chua" ? 3 : 2)};
}

json stability_json(const StabilityReport& r) {
  json modes = json::array();
  for (const auto& m : r.modes) {
    modes.push_back({{"mode", m.index},
                     {"lambda", m.lambda},
                     {"abscissa", m.abscissa},
                     {"stable", m.stable}});
  }
  return {{"stable", r.stable}, {"modes", std::move(modes)}};
}

json assumption_json(const AssumptionReport& r) {
  json notes = json::array();
  for (const auto& n : r.notes) notes.push_back(n);
  return {{"A1_stabilizable", r.stabilizable},
          {"A2_d_orthonormal", r.d_orthonormal},
          {"A3_detectable", r.detectable},
          {"A4_no_imaginary_zeros", r.no_imaginary_zeros},
          {"notes", std::move(notes)}};
}

Vector initial_error(const ExperimentConfig& cfg, const Equilibrium& s) {
  if (cfg.eta0) return *cfg.eta0;
  Vector x0 = random_initial_state(cfg.topology.n, cfg.sim);
  for (Index i = 0; i < cfg.topology.n; ++i) {
    x0.segment(i * s.state.size(), s.state.size()) -= s.state;
  }
  return x0;
}

bool is_lure_closed_form_case(const ExperimentConfig& cfg) {
  if (cfg.model.name != "lure") return false;
  return cfg.gamma == identity(2) && cfg.b == identity(2) &&
         cfg.c == cfg.model.lure.c1_row();
}

struct Synthesis {
  Matrix gain;
  double closed_loop_abscissa = 0.0;
  double worst_residual_ratio = 0.0;
  json per_mode = json::array();
};

/// Assumption check and gain synthesis for the configured method. Returns
/// false with `failure` filled when an assumption fails.
bool synthesize(const ExperimentConfig& cfg, const LinearizedNetwork& lin,
                const OuterCoupling& coupling, Synthesis& out, json& failure) {
  if (cfg.controller.method == LqrMethod::Full) {
    const auto report = check_assumptions(
        make_lqr_problem(lin.a_c, lin.b_c, lin.c_c, lin.d_c));
    if (!report.all()) {
      failure = {{"network", assumption_json(report)}};
      return false;
    }
    const auto sol = lqr_gain_full(lin);
    out.gain = sol.f;
    out.closed_loop_abscissa = sol.closed_loop_abscissa;
    out.worst_residual_ratio =
        sol.residual_scale > 0 ? sol.residual / sol.residual_scale : sol.residual;
    return true;
  }
  const auto modes = modal_decompose(lin, coupling);
  json verdicts = json::array();
  bool ok = true;
  for (const auto& m : modes) {
    const auto report = check_assumptions(make_lqr_problem(m.a, m.b, m.c, m.d));
    if (!report.all()) {
      ok = false;
      json v = assumption_json(report);
      v["mode"] = m.index;
      v["lambda"] = m.lambda;
      verdicts.push_back(std::move(v));
    }
  }
  if (!ok) {
    failure = {{"failing_modes", std::move(verdicts)}};
    return false;
  }
  const auto gain = lqr_gain_modal(modes, coupling);
  out.gain = gain.gain;
  out.closed_loop_abscissa = gain.closed_loop_abscissa;
  for (std::size_t i = 0; i < gain.per_mode.size(); ++i) {
    const auto& sol = gain.per_mode[i];
    const double ratio =
        sol.residual_scale > 0 ? sol.residual / sol.residual_scale : sol.residual;
    out.worst_residual_ratio = std::max(out.worst_residual_ratio, ratio);
    out.per_mode.push_back({{"mode", static_cast<Index>(i)},
                            {"lambda", gain.lambdas[i]},
                            {"closed_loop_abscissa", sol.closed_loop_abscissa},
                            {"residual", sol.residual},
                            {"residual_scale", sol.residual_scale},
                            {"iterations", sol.iterations}});
  }
  return true;
}

ErrorSignal select_error(const ExperimentConfig& cfg, const Trajectory& traj,
                         const Equilibrium& s) {
  switch (cfg.error) {
    case ErrorReference::NodeOne: return error_to_node1(traj);
    case ErrorReference::Equilibrium: return error_to_equilibrium(traj, s.state);
    case ErrorReference::Output: return output_error(traj);
  }
  return output_error(traj);
}

void append_block_headers(std::string& line, char tag, const Matrix& block,
                          Index n_nodes) {
  if (block.size() == 0) return;
  const Index per = block.rows() / n_nodes;
  for (Index i = 0; i < n_nodes; ++i) {
    for (Index k = 0; k < per; ++k) {
      line += ',';
      line += tag;
      line += std::to_string(i + 1) + "_" + std::to_string(k + 1);
    }
  }
}

std::string trajectory_csv(const ExperimentConfig& cfg, const Trajectory& traj,
                           const ErrorSignal& err) {
  const Vector cumulative = err.cumulative_l2();
  std::string text;
  const Index stride = cfg.output.stride;
  auto keep = [&](Index k) { return k % stride == 0 || k + 1 == traj.samples(); };
  if (cfg.output.layout == CsvLayout::Wide) {
    std::string head = "t";
    append_block_headers(head, 'x', traj.states, traj.n_nodes);
    append_block_headers(head, 'y', traj.outputs, traj.n_nodes);
    append_block_headers(head, 'u', traj.controls, traj.n_nodes);
    text += head + ",e_norm,l2_cumulative\n";
    for (Index k = 0; k < traj.samples(); ++k) {
      if (!keep(k)) continue;
      text += format_number(traj.times[k]);
      for (const Matrix* m : {&traj.states, &traj.outputs, &traj.controls}) {
        if (m->size() == 0) continue;
        for (Index r = 0; r < m->rows(); ++r) text += "," + format_number((*m)(r, k));
      }
      text += "," + format_number(err.e.col(k).norm());
      text += "," + format_number(cumulative[k]) + "\n";
    }
    return text;
  }
  text = "t,signal,node,component,value\n";
  for (Index k = 0; k < traj.samples(); ++k) {
    if (!keep(k)) continue;
    const std::string t = format_number(traj.times[k]);
    const std::pair<const char*, const Matrix*> blocks[] = {
        {"x", &traj.states}, {"y", &traj.outputs}, {"u", &traj.controls}};
    for (const auto& [name, m] : blocks) {
      if (m->size() == 0) continue;
      const Index per = m->rows() / traj.n_nodes;
      for (Index r = 0; r < m->rows(); ++r) {
        text += t + "," + name + "," + std::to_string(r / per + 1) + "," +
                std::to_string(r % per + 1) + "," + format_number((*m)(r, k)) + "\n";
      }
    }
    text += t + ",e_norm,0,0," + format_number(err.e.col(k).norm()) + "\n";
  }
  return text;
}

}  // namespace

std::string render(const json& j) { return j.dump(2) + "\n"; }

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int cmd_topo(const ExperimentConfig& cfg, std::ostream& out) {
  const OuterCoupling coupling = cfg.coupling();
  const auto report = validate_assumption1(coupling.matrix());
  json j;
  j["command"] = "topo";
  j["topology"] = {{"kind", std::string(to_string(cfg.topology.kind))},
                   {"n", cfg.topology.n},
                   {"k", cfg.topology.k}};
  j["matrix"] = matrix_to_json(coupling.matrix());
  j["eigenvalues"] = coupling.symmetric() ? vector_to_json(coupling.eigenvalues())
                                          : json(nullptr);
  json failures = json::array();
  for (const auto& f : report.failures) failures.push_back(f);
  j["assumption1"] = {
      {"passed", report.passed()},
      {"symmetric", report.symmetric},
      {"nonpositive_off_diagonal", report.nonpositive_off_diagonal},
      {"zero_row_sums", report.zero_row_sums},
      {"irreducible", report.irreducible},
      {"zero_eigenvalue_multiplicity", report.zero_eigenvalue_multiplicity},
      {"algebraic_connectivity", report.algebraic_connectivity
                                     ? json(*report.algebraic_connectivity)
                                     : json(nullptr)},
      {"failures", std::move(failures)}};
  if (!cfg.output.dir.empty()) {
    write_file_atomic(output_path(cfg, "_coupling.csv"),
                      format_matrix_csv(coupling.matrix()));
  }
  return emit(cfg, std::move(j), out, report.passed() ? kExitOk : kExitConfig);
}

int cmd_h2(const ExperimentConfig& cfg, std::ostream& out) {
  const Network net = cfg.network();
  const Equilibrium s = origin(cfg);
  const auto lin = assemble_linearization(net, s, cfg.b, cfg.c,
                                          Matrix::Zero(cfg.c.rows(), cfg.b.cols()));
  json report = header(cfg);
  const auto stability = sync_stability(net, s);
  report["stability"] = stability_json(stability);
  if (!stability.stable) {
    for (const auto& m : stability.modes) {
      if (m.stable) continue;
      report["error"] = {{"kind", "unstable_mode"},
                         {"mode", m.index},
                         {"lambda", m.lambda},
                         {"abscissa", m.abscissa}};
      break;
    }
    return emit(cfg, std::move(report), out, kExitAssumption);
  }

  const auto modes = modal_decompose(lin, net.coupling);
  const auto modal = h2_modal(modes);
  json h2;
  h2["value"] = modal.value;
  h2["squared"] = modal.squared;
  json per_mode = json::array();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    per_mode.push_back({{"mode", modes[i].index},
                        {"lambda", modes[i].lambda},
                        {"squared", (*modal.per_mode)[i]}});
  }
  h2["per_mode"] = std::move(per_mode);
  if (lin.state_dim() <= kFullH2MaxStates) {
    const auto full = h2_norm(lin.a_c, lin.b_c, lin.c_c);
    h2["full"] = full.value;
    h2["full_vs_modal_relative"] = std::abs(full.value - modal.value) / modal.value;
  } else {
    h2["full"] = nullptr;
    h2["full_skipped"] = "state dimension " + std::to_string(lin.state_dim()) +
                         " exceeds " + std::to_string(kFullH2MaxStates);
  }
  if (is_lure_closed_form_case(cfg)) {
    double sum = 0.0;
    for (const auto& m : modes) sum += lure_h2_closed_form(cfg.model.lure, cfg.sigma, m.lambda);
    h2["closed_form"] = std::sqrt(sum);
    h2["closed_form_vs_modal_relative"] = std::abs(std::sqrt(sum) - modal.value) / modal.value;
  } else {
    h2["closed_form"] = nullptr;
  }
  report["h2"] = std::move(h2);

  const auto t1 = theorem1_report(modes);
  report["monotonicity"] = {{"applicable", t1.applicable},
                            {"reason", t1.reason},
                            {"holds", t1.holds()},
                            {"violations", t1.monotonicity_violations},
                            {"worst_margin", t1.worst_monotonicity_margin},
                            {"lower_chain_holds", t1.lower_chain_holds},
                            {"upper_chain_holds", t1.upper_chain_holds}};

  const Vector eta0 = initial_error(cfg, s);
  report["impulse_bound"] = {{"eta0_source", cfg.eta0 ? "config" : "seeded"},
                      {"eta0_norm", eta0.norm()},
                      {"bound", lemma3_bound(modal.value, eta0)}};
  return emit(cfg, std::move(report), out, kExitOk);
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out) {
  const Network net = cfg.network();
  const Equilibrium s = origin(cfg);
  const Index n_nodes = net.n_nodes();
  json report = header(cfg);

  IntegrateOptions opts;
  opts.equilibrium = s.state;
  opts.tail_signal = cfg.error;
  json controller = {{"type", "none"}};
  if (cfg.controller.type == ControllerType::Pinning) {
    const auto pinned = sample_pinned_nodes(n_nodes, cfg.controller.count, cfg.controller.seed);
    opts.controller = pinning_controller(pinned, cfg.sigma, cfg.controller.d, cfg.gamma, n_nodes);
    json nodes = json::array();
    for (Index p : pinned) nodes.push_back(p);
    controller = {{"type", "pinning"}, {"pinned_nodes", std::move(nodes)}};
  } else if (cfg.controller.type == ControllerType::Lqr) {
    const auto lin = assemble_linearization(net, s, cfg.b, cfg.c, cfg.d);
    Synthesis syn;
    json failure;
    if (!synthesize(cfg, lin, net.coupling, syn, failure)) {
      report["error"] = {{"kind", "assumption"}, {"detail", std::move(failure)}};
      return emit(cfg, std::move(report), out, kExitAssumption);
    }
    opts.controller = linear_feedback(syn.gain, cfg.b);
    controller = {{"type", "lqr"}, {"closed_loop_abscissa", syn.closed_loop_abscissa}};
  }
  if (cfg.error == ErrorReference::Output || opts.controller) {
    opts.output = OutputMap{cfg.c, opts.controller ? cfg.d : Matrix()};
  }

  const Vector x0 = random_initial_state(n_nodes, cfg.sim);
  const Trajectory traj = integrate(net, x0, cfg.sim, opts);
  const ErrorSignal err = select_error(cfg, traj, s);

  json result;
  result["l2"] = err.l2;
  result["t_end"] = traj.t_end();
  result["samples"] = traj.samples();
  result["tail_fired"] = traj.tail_fired;
  result["seed"] = cfg.sim.seed;
  result["diverged"] = traj.diverged();
  result["blowup_time"] = traj.blowup_time ? json(*traj.blowup_time) : json(nullptr);
  result["controller"] = std::move(controller);
  report["result"] = std::move(result);

  if (!cfg.output.dir.empty()) {
    write_file_atomic(output_path(cfg, "_trajectory.csv"), trajectory_csv(cfg, traj, err));
  }
  if (traj.diverged()) {
    report["error"] = {{"kind", "divergence"}, {"time", *traj.blowup_time}};
    return emit(cfg, std::move(report), out, kExitDivergence);
  }
  return emit(cfg, std::move(report), out, kExitOk);
}

int cmd_lqr(const ExperimentConfig& cfg, std::ostream& out) {
  const Network net = cfg.network();
  const Equilibrium s = origin(cfg);
  const auto lin = assemble_linearization(net, s, cfg.b, cfg.c, cfg.d);
  json report = header(cfg);

  Synthesis syn;
  json failure;
  if (!synthesize(cfg, lin, net.coupling, syn, failure)) {
    report["error"] = {{"kind", "assumption"}, {"detail", std::move(failure)}};
    return emit(cfg, std::move(report), out, kExitAssumption);
  }

  json result;
  result["method"] = cfg.controller.method == LqrMethod::Modal ? "modal" : "full";
  result["closed_loop_abscissa"] = syn.closed_loop_abscissa;
  result["worst_residual_ratio"] = syn.worst_residual_ratio;
  result["per_mode"] = syn.per_mode;
  if (cfg.controller.method == LqrMethod::Modal &&
      lin.state_dim() <= kFullSynthesisMaxStates) {
    const auto full = lqr_gain_full(lin);
    result["modal_vs_full_relative"] = (full.f - syn.gain).norm() / full.f.norm();
  }

  const Vector eta0 = initial_error(cfg, s);
  result["eta0_source"] = cfg.eta0 ? "config" : "seeded";
  result["minimized_output_l2"] = minimized_output_norm(lin, syn.gain, eta0);

  if (cfg.controller.simulate) {
    IntegrateOptions opts;
    opts.equilibrium = s.state;
    opts.tail_signal = ErrorReference::Output;
    opts.controller = linear_feedback(syn.gain, cfg.b);
    opts.output = OutputMap{cfg.c, cfg.d};
    Vector x0 = eta0;
    for (Index i = 0; i < net.n_nodes(); ++i) {
      x0.segment(i * s.state.size(), s.state.size()) += s.state;
    }
    const auto traj = integrate(net, x0, cfg.sim, opts);
    result["simulated_output_l2"] = output_error(traj).l2;
    result["simulation_diverged"] = traj.diverged();
  }
  report["result"] = std::move(result);

  if (!cfg.output.dir.empty()) {
    write_file_atomic(output_path(cfg, "_gain.csv"), format_matrix_csv(syn.gain));
  }
  return emit(cfg, std::move(report), out, kExitOk);
}

}  // namespace netsync::cli
