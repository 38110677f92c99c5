#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace netsync::cli {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path.empty() ? what : path + ": " + what);
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(path, "unknown key '" + key + "'");
    }
  }
}

const json* find(const json& obj, std::string_view key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

double number(const json& obj, std::string_view key, double fallback,
              const std::string& path) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) fail(join(path, key), "expected a number");
  const double x = v->get<double>();
  if (!std::isfinite(x)) fail(join(path, key), "must be finite");
  return x;
}

std::int64_t integer(const json& obj, std::string_view key, std::int64_t fallback,
                     const std::string& path) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) fail(join(path, key), "expected an integer");
  return v->get<std::int64_t>();
}

std::string string(const json& obj, std::string_view key, std::string fallback,
                   const std::string& path) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) fail(join(path, key), "expected a string");
  return v->get<std::string>();
}

bool boolean(const json& obj, std::string_view key, bool fallback,
             const std::string& path) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(join(path, key), "expected true or false");
  return v->get<bool>();
}

std::uint64_t parse_seed(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    fail(path, "expected a non-negative integer seed");
  }
  return v.get<std::uint64_t>();
}

std::uint64_t parse_env_seed(const char* text) {
  const std::string_view s(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    fail("NETSYNC_SEED", "expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return value;
}

Matrix parse_array_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of rows");
  const Index rows = static_cast<Index>(v.size());
  Index cols = -1;
  Matrix m;
  for (Index i = 0; i < rows; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.empty()) fail(path, "every row must be a non-empty array");
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Index>(row.size()) != cols) {
      fail(path, "ragged matrix rows");
    }
    for (Index j = 0; j < cols; ++j) {
      const json& x = row[static_cast<std::size_t>(j)];
      if (!x.is_number()) fail(path, "matrix entries must be numbers");
      m(i, j) = x.get<double>();
    }
  }
  if (!m.allFinite()) fail(path, "matrix entries must be finite");
  return m;
}

// Presets: "identity" (square, size `square_dim`), "zero" (zero_rows x
// zero_cols), "lure-output" (C1 of the Lur'e node); a number k means k I.
struct MatrixRule {
  Index square_dim = 0;
  Index zero_rows = 0;
  Index zero_cols = 0;
  const LureParams* lure = nullptr;
};

Matrix parse_matrix(const json* v, const std::string& fallback, const MatrixRule& rule,
                    const std::string& path) {
  if (!v || v->is_string()) {
    const std::string name = v ? v->get<std::string>() : fallback;
    if (name == "identity") return identity(rule.square_dim);
    if (name == "zero") return Matrix::Zero(rule.zero_rows, rule.zero_cols);
    if (name == "lure-output") {
      if (!rule.lure) fail(path, "'lure-output' requires the lure model");
      return rule.lure->c1_row();
    }
    fail(path, "unknown matrix preset '" + name + "'");
  }
  if (v->is_number()) return v->get<double>() * identity(rule.square_dim);
  return parse_array_matrix(*v, path);
}

Vector parse_bounds(const json* v, double fallback, Index n, const std::string& path) {
  if (!v) return Vector::Constant(n, fallback);
  if (v->is_number()) return Vector::Constant(n, v->get<double>());
  if (!v->is_array() || static_cast<Index>(v->size()) != n) {
    fail(path, "expected a number or an array of " + std::to_string(n) + " numbers");
  }
  Vector out(n);
  for (Index k = 0; k < n; ++k) {
    const json& x = (*v)[static_cast<std::size_t>(k)];
    if (!x.is_number()) fail(path, "expected numbers");
    out[k] = x.get<double>();
  }
  return out;
}

ErrorReference parse_error(const std::string& s, const std::string& path) {
  if (s == "node1") return ErrorReference::NodeOne;
  if (s == "equilibrium") return ErrorReference::Equilibrium;
  if (s == "output") return ErrorReference::Output;
  fail(path, "expected node1, equilibrium or output, got '" + s + "'");
}

std::string_view error_name(ErrorReference e) {
  switch (e) {
    case ErrorReference::NodeOne: return "node1";
    case ErrorReference::Equilibrium: return "equilibrium";
    case ErrorReference::Output: return "output";
  }
  return "output";
}

std::string_view controller_name(ControllerType t) {
  switch (t) {
    case ControllerType::None: return "none";
    case ControllerType::Pinning: return "pinning";
    case ControllerType::Lqr: return "lqr";
  }
  return "none";
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Topo: return "topo";
    case Command::H2: return "h2";
    case Command::Simulate: return "simulate";
    case Command::Lqr: return "lqr";
    case Command::Reproduce: return "reproduce";
  }
  return "h2";
}

NodeModel ExperimentConfig::node_model() const {
  return model.name == "chua" ? NodeModel::chua(model.chua) : NodeModel::lure(model.lure);
}

OuterCoupling ExperimentConfig::coupling() const {
  // A single node has nothing to couple to, whatever the family.
  if (topology.n == 1) return OuterCoupling::from_matrix(Matrix::Zero(1, 1), topology.kind);
  if (topology.kind == TopologyKind::Custom) {
    return custom_topology(topology.edges, topology.n);
  }
  return build_topology(topology.kind, topology.n, topology.k);
}

Network ExperimentConfig::network() const {
  return make_network(node_model(), coupling(), sigma, gamma);
}

ExperimentConfig resolve_config(Command command, const json& tree, const char* env_seed) {
  const json root = tree.is_null() ? json::object() : tree;
  check_keys(root,
             {"command", "model", "chua", "lure", "topology", "sigma", "gamma", "b", "c",
              "d", "sim", "error", "controller", "eta0", "output"},
             "");

  ExperimentConfig cfg;
  cfg.command = command;

  // Informational only; the subcommand decides.
  if (const json* c = find(root, "command"); c && !c->is_string()) {
    fail("command", "expected a string");
  }

  cfg.model.name = string(root, "model", command == Command::Lqr ? "chua" : "lure", "");
  if (cfg.model.name != "chua" && cfg.model.name != "lure") {
    fail("model", "expected chua or lure, got '" + cfg.model.name + "'");
  }
  const bool chua = cfg.model.name == "chua";
  if (const json* p = find(root, "chua")) {
    check_keys(*p, {"alpha", "beta", "gamma", "m1", "m2"}, "chua");
    auto& c = cfg.model.chua;
    c.alpha = number(*p, "alpha", c.alpha, "chua");
    c.beta = number(*p, "beta", c.beta, "chua");
    c.gamma = number(*p, "gamma", c.gamma, "chua");
    c.m1 = number(*p, "m1", c.m1, "chua");
    c.m2 = number(*p, "m2", c.m2, "chua");
  }
  if (const json* p = find(root, "lure")) {
    check_keys(*p, {"a", "b", "b1", "b2", "c1", "c2"}, "lure");
    auto& l = cfg.model.lure;
    l.a = number(*p, "a", l.a, "lure");
    l.b = number(*p, "b", l.b, "lure");
    l.b1 = number(*p, "b1", l.b1, "lure");
    l.b2 = number(*p, "b2", l.b2, "lure");
    l.c1 = number(*p, "c1", l.c1, "lure");
    l.c2 = number(*p, "c2", l.c2, "lure");
  }
  const Index n = chua ? 3 : 2;

  const json topo = find(root, "topology") ? root["topology"] : json::object();
  check_keys(topo, {"kind", "n", "k", "edges"}, "topology");
  try {
    cfg.topology.kind = parse_topology_kind(string(topo, "kind", "global", "topology"));
  } catch (const InvalidArgument& e) {
    fail("topology.kind", e.what());
  }
  cfg.topology.n = integer(topo, "n", 20, "topology");
  cfg.topology.k = static_cast<int>(integer(topo, "k", 1, "topology"));
  if (cfg.topology.n < 1) fail("topology.n", "must be positive");
  if (cfg.topology.kind == TopologyKind::Custom) {
    const json* edges = find(topo, "edges");
    if (!edges || !edges->is_array()) {
      fail("topology.edges", "custom topology requires an array of [i, j, weight]");
    }
    for (const auto& e : *edges) {
      if (!e.is_array() || e.size() < 2 || e.size() > 3 || !e[0].is_number_integer() ||
          !e[1].is_number_integer() || (e.size() == 3 && !e[2].is_number())) {
        fail("topology.edges", "each edge is [i, j] or [i, j, weight] (zero-based)");
      }
      cfg.topology.edges.push_back(
          {e[0].get<Index>(), e[1].get<Index>(), e.size() == 3 ? e[2].get<double>() : 1.0});
    }
  } else if (find(topo, "edges")) {
    fail("topology.edges", "only valid for kind 'custom'");
  }

  const double default_sigma = chua ? (command == Command::Lqr ? 1.0 : 6.0) : 2.0;
  cfg.sigma = number(root, "sigma", default_sigma, "");
  if (cfg.sigma < 0) fail("sigma", "must be non-negative");

  MatrixRule square{n, n, n, nullptr};
  cfg.gamma = parse_matrix(find(root, "gamma"), "identity", square, "gamma");
  cfg.b = parse_matrix(find(root, "b"), "identity", square, "b");
  MatrixRule crule{n, 0, 0, chua ? nullptr : &cfg.model.lure};
  cfg.c = parse_matrix(find(root, "c"), chua ? "identity" : "lure-output", crule, "c");
  MatrixRule drule{cfg.c.rows(), cfg.c.rows(), cfg.b.cols(), nullptr};
  cfg.d = parse_matrix(find(root, "d"), chua ? "identity" : "zero", drule, "d");
  if (cfg.gamma.rows() != n || cfg.gamma.cols() != n) fail("gamma", "must be n x n");
  if (cfg.b.rows() != n) fail("b", "must have n rows");
  if (cfg.c.cols() != n) fail("c", "must have n columns");
  if (cfg.d.rows() != cfg.c.rows() || cfg.d.cols() != cfg.b.cols()) {
    fail("d", "must be (rows of c) x (columns of b)");
  }

  const json sim = find(root, "sim") ? root["sim"] : json::object();
  check_keys(sim, {"dt", "t_final", "seed", "ic_low", "ic_high", "tail_epsilon",
                   "blowup_threshold"},
             "sim");
  cfg.sim.dt = number(sim, "dt", 1e-3, "sim");
  cfg.sim.t_final =
      number(sim, "t_final", chua && command != Command::Lqr ? 30.0 : 20.0, "sim");
  if (const json* s = find(sim, "seed")) {
    cfg.sim.seed = parse_seed(*s, "sim.seed");
  } else if (env_seed && *env_seed) {
    cfg.sim.seed = parse_env_seed(env_seed);
  } else {
    cfg.sim.seed = 1;
  }
  const double spread = chua ? 2.0 : 1.0;
  cfg.sim.ic_low = parse_bounds(find(sim, "ic_low"), -spread, n, "sim.ic_low");
  cfg.sim.ic_high = parse_bounds(find(sim, "ic_high"), spread, n, "sim.ic_high");
  if (sim.contains("tail_epsilon") && sim["tail_epsilon"].is_null()) {
    cfg.sim.tail_epsilon.reset();
  } else {
    cfg.sim.tail_epsilon = number(sim, "tail_epsilon", 1e-8, "sim");
  }
  cfg.sim.blowup_threshold = number(sim, "blowup_threshold", 1e6, "sim");
  try {
    validate(cfg.sim, n);
  } catch (const InvalidArgument& e) {
    fail("sim", e.what());
  }

  const json ctrl = find(root, "controller") ? root["controller"] : json::object();
  check_keys(ctrl, {"type", "count", "d", "seed", "method", "simulate"}, "controller");
  const std::string type =
      string(ctrl, "type", command == Command::Lqr ? "lqr" : "none", "controller");
  if (type == "none") {
    cfg.controller.type = ControllerType::None;
  } else if (type == "pinning") {
    cfg.controller.type = ControllerType::Pinning;
  } else if (type == "lqr") {
    cfg.controller.type = ControllerType::Lqr;
  } else {
    fail("controller.type", "expected none, pinning or lqr, got '" + type + "'");
  }
  cfg.controller.count = integer(ctrl, "count", 6, "controller");
  cfg.controller.d = number(ctrl, "d", 20.0, "controller");
  cfg.controller.seed =
      find(ctrl, "seed") ? parse_seed(ctrl["seed"], "controller.seed") : cfg.sim.seed;
  const std::string method = string(ctrl, "method", "modal", "controller");
  if (method == "modal") {
    cfg.controller.method = LqrMethod::Modal;
  } else if (method == "full") {
    cfg.controller.method = LqrMethod::Full;
  } else {
    fail("controller.method", "expected modal or full, got '" + method + "'");
  }
  cfg.controller.simulate = boolean(ctrl, "simulate", false, "controller");
  if (cfg.controller.type == ControllerType::Pinning) {
    if (cfg.controller.count < 1 || cfg.controller.count > cfg.topology.n) {
      fail("controller.count", "must be in [1, N]");
    }
    if (!(cfg.controller.d > 0)) fail("controller.d", "must be positive");
    if (cfg.b != identity(n)) fail("b", "pinning control needs B = I_n");
  }
  if (command == Command::Lqr && cfg.controller.type != ControllerType::Lqr) {
    fail("controller.type", "the lqr command requires type 'lqr'");
  }

  const std::string err_default =
      cfg.controller.type != ControllerType::None || !chua ? "output" : "node1";
  cfg.error = parse_error(string(root, "error", err_default, ""), "error");

  if (const json* e = find(root, "eta0")) {
    const Index len = cfg.topology.n * n;
    cfg.eta0 = parse_bounds(e, 0.0, len, "eta0");
  }

  const json out = find(root, "output") ? root["output"] : json::object();
  check_keys(out, {"dir", "prefix", "csv", "stride"}, "output");
  cfg.output.dir = string(out, "dir", "", "output");
  cfg.output.prefix = string(out, "prefix", "run", "output");
  const std::string layout = string(out, "csv", "wide", "output");
  if (layout == "wide") {
    cfg.output.layout = CsvLayout::Wide;
  } else if (layout == "long") {
    cfg.output.layout = CsvLayout::Long;
  } else {
    fail("output.csv", "expected wide or long, got '" + layout + "'");
  }
  cfg.output.stride = integer(out, "stride", 10, "output");
  if (cfg.output.stride < 1) fail("output.stride", "must be positive");
  if (cfg.output.prefix.empty() ||
      cfg.output.prefix.find('/') != std::string::npos) {
    fail("output.prefix", "must be a non-empty file name stem");
  }
  return cfg;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["command"] = std::string(to_string(cfg.command));
  j["model"] = cfg.model.name;
  if (cfg.model.name == "chua") {
    const auto& c = cfg.model.chua;
    j["chua"] = {{"alpha", c.alpha}, {"beta", c.beta}, {"gamma", c.gamma},
                 {"m1", c.m1},       {"m2", c.m2}};
  } else {
    const auto& l = cfg.model.lure;
    j["lure"] = {{"a", l.a},   {"b", l.b},   {"b1", l.b1},
                 {"b2", l.b2}, {"c1", l.c1}, {"c2", l.c2}};
  }
  json topo;
  topo["kind"] = std::string(to_string(cfg.topology.kind));
  topo["n"] = cfg.topology.n;
  topo["k"] = cfg.topology.k;
  if (cfg.topology.kind == TopologyKind::Custom) {
    json edges = json::array();
    for (const auto& e : cfg.topology.edges) edges.push_back({e.i, e.j, e.weight});
    topo["edges"] = std::move(edges);
  }
  j["topology"] = std::move(topo);
  j["sigma"] = cfg.sigma;
  j["gamma"] = matrix_to_json(cfg.gamma);
  j["b"] = matrix_to_json(cfg.b);
  j["c"] = matrix_to_json(cfg.c);
  j["d"] = matrix_to_json(cfg.d);
  json sim;
  sim["dt"] = cfg.sim.dt;
  sim["t_final"] = cfg.sim.t_final;
  sim["seed"] = cfg.sim.seed;
  sim["ic_low"] = vector_to_json(cfg.sim.ic_low);
  sim["ic_high"] = vector_to_json(cfg.sim.ic_high);
  sim["tail_epsilon"] = cfg.sim.tail_epsilon ? json(*cfg.sim.tail_epsilon) : json(nullptr);
  sim["blowup_threshold"] = cfg.sim.blowup_threshold;
  j["sim"] = std::move(sim);
  j["error"] = std::string(error_name(cfg.error));
  json ctrl;
  ctrl["type"] = std::string(controller_name(cfg.controller.type));
  ctrl["count"] = cfg.controller.count;
  ctrl["d"] = cfg.controller.d;
  ctrl["seed"] = cfg.controller.seed;
  ctrl["method"] = cfg.controller.method == LqrMethod::Modal ? "modal" : "full";
  ctrl["simulate"] = cfg.controller.simulate;
  j["controller"] = std::move(ctrl);
  j["eta0"] = cfg.eta0 ? vector_to_json(*cfg.eta0) : json(nullptr);
  json out;
  out["dir"] = cfg.output.dir;
  out["prefix"] = cfg.output.prefix;
  out["csv"] = cfg.output.layout == CsvLayout::Wide ? "wide" : "long";
  out["stride"] = cfg.output.stride;
  j["output"] = std::move(out);
  return j;
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
}

}  // namespace netsync::cli
