#include "netsync/netmodel.hpp"

#include <cmath>
#include <utility>

#include "netsync/error.hpp"

namespace netsync {

Network make_network(NodeModel model, OuterCoupling coupling, double sigma,
                     Matrix gamma) {
  const Index n = model.dimension();
  if (gamma.size() == 0) gamma = identity(n);
  if (gamma.rows() != n || gamma.cols() != n) {
    throw InvalidArgument("inner linking matrix must be " + std::to_string(n) +
                          "x" + std::to_string(n));
  }
  if (!std::isfinite(sigma)) {
    throw InvalidArgument("coupling strength must be finite");
  }
  return Network{std::move(model), std::move(coupling), sigma,
                 std::move(gamma)};
}

LinearizedNetwork assemble_linearization(const Network& net,
                                         const Equilibrium& s, const Matrix& b,
                                         const Matrix& c, const Matrix& d,
                                         double equilibrium_tol) {
  const Index n = net.node_dim();
  if (!verify_equilibrium(net.model, s.state, equilibrium_tol)) {
    throw InvalidArgument("point is not an equilibrium of the node model "
                          "(||f(s)|| exceeds tolerance)");
  }
  if (b.rows() != n) {
    throw InvalidArgument("B must have " + std::to_string(n) + " rows");
  }
  if (c.cols() != n) {
    throw InvalidArgument("C must have " + std::to_string(n) + " columns");
  }
  if (d.rows() != c.rows() || d.cols() != b.cols()) {
    throw InvalidArgument("D must be " + std::to_string(c.rows()) + "x" +
                          std::to_string(b.cols()));
  }
  LinearizedNetwork lin;
  lin.node_jacobian = jacobian_at(net.model, s);
  lin.coupling_matrix = net.coupling.matrix();
  lin.gamma = net.gamma;
  lin.b = b;
  lin.c = c;
  lin.d = d;
  lin.sigma = net.sigma;
  lin.n_nodes = net.n_nodes();

  const Matrix eye_n = identity(lin.n_nodes);
  lin.a_c = kron(eye_n, lin.node_jacobian) -
            net.sigma * kron(lin.coupling_matrix, lin.gamma);
  lin.b_c = kron(eye_n, b);
  lin.c_c = kron(eye_n, c);
  lin.d_c = kron(eye_n, d);
  return lin;
}

std::vector<ModalSystem> modal_decompose(const LinearizedNetwork& lin,
                                         const OuterCoupling& coupling) {
  if (coupling.size() != lin.n_nodes) {
    throw InvalidArgument("coupling size does not match the network");
  }
  const Vector& lambdas = coupling.eigenvalues();
  std::vector<ModalSystem> modes;
  modes.reserve(static_cast<std::size_t>(lambdas.size()));
  for (Index i = 0; i < lambdas.size(); ++i) {
    ModalSystem m;
    m.index = i;
    m.lambda = lambdas[i];
    m.sigma = lin.sigma;
    m.a = lin.node_jacobian - lin.sigma * lambdas[i] * lin.gamma;
    m.b = lin.b;
    m.c = lin.c;
    m.d = lin.d;
    m.gamma = lin.gamma;
    modes.push_back(std::move(m));
  }
  return modes;
}

Matrix recombine_modes(const std::vector<ModalSystem>& modes,
                       const OuterCoupling& coupling) {
  std::vector<Matrix> blocks;
  blocks.reserve(modes.size());
  for (const auto& m : modes) blocks.push_back(m.a);
  const Index n = modes.empty() ? 0 : modes.front().a.rows();
  const Matrix t = kron(coupling.eigenvectors(), identity(n));
  return t * block_diagonal(blocks) * t.transpose();
}

std::vector<Vector> modal_inputs(const Vector& eta0,
                                 const OuterCoupling& coupling) {
  const Index n_nodes = coupling.size();
  if (n_nodes == 0 || eta0.size() % n_nodes != 0) {
    throw InvalidArgument("eta0 length " + std::to_string(eta0.size()) +
                          " is not a multiple of N=" + std::to_string(n_nodes));
  }
  const Index n = eta0.size() / n_nodes;
  const Matrix& u = coupling.eigenvectors();
  // Columns of eta_mat are node blocks; omega_mat = eta_mat * U.
  const Eigen::Map<const Matrix> eta_mat(eta0.data(), n, n_nodes);
  const Matrix omega_mat = eta_mat * u;
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(n_nodes));
  for (Index i = 0; i < n_nodes; ++i) out.emplace_back(omega_mat.col(i));
  return out;
}

StabilityReport sync_stability(const Network& net, const Equilibrium& s,
                               double margin) {
  const Matrix df = jacobian_at(net.model, s);
  const Vector& lambdas = net.coupling.eigenvalues();
  StabilityReport report;
  report.stable = true;
  for (Index i = 0; i < lambdas.size(); ++i) {
    ModeStability ms;
    ms.index = i;
    ms.lambda = lambdas[i];
    ms.abscissa = spectral_abscissa(df - net.sigma * lambdas[i] * net.gamma);
    ms.stable = ms.abscissa < -margin;
    report.stable = report.stable && ms.stable;
    report.modes.push_back(ms);
  }
  return report;
}

}  // namespace netsync
