#pragma once

// Coupled network x_i' = f(x_i) - sigma * sum_j m_ij Gamma x_j, its
// linearisation about a synchronous equilibrium and the modal decomposition
// induced by the eigenvectors of a symmetric M.

#include <vector>

#include "netsync/dynamics.hpp"
#include "netsync/matrix.hpp"
#include "netsync/topology.hpp"

namespace netsync {

struct Network {
  NodeModel model;
  OuterCoupling coupling;
  double sigma = 1.0;
  Matrix gamma;  // inner linking matrix, n x n

  Index n_nodes() const { return coupling.size(); }
  Index node_dim() const { return model.dimension(); }
  Index state_dim() const { return n_nodes() * node_dim(); }
};

/// Validates dimensions; an empty gamma defaults to the identity.
Network make_network(NodeModel model, OuterCoupling coupling, double sigma,
                     Matrix gamma = {});

/// State-space quadruple of the linearised network together with the
/// node-level factors it was assembled from.
struct LinearizedNetwork {
  Matrix a_c;
  Matrix b_c;
  Matrix c_c;
  Matrix d_c;

  Matrix node_jacobian;
  Matrix coupling_matrix;
  Matrix gamma;
  Matrix b;
  Matrix c;
  Matrix d;
  double sigma = 0.0;
  Index n_nodes = 0;

  Index node_dim() const { return node_jacobian.rows(); }
  Index state_dim() const { return a_c.rows(); }
};

/// A_c = I_N (x) Df(s) - sigma M (x) Gamma, B_c = I_N (x) B, ...
/// Throws InvalidArgument when s fails verify_equilibrium(tol) or the
/// node matrices have incompatible shapes.
LinearizedNetwork assemble_linearization(const Network& net,
                                         const Equilibrium& s, const Matrix& b,
                                         const Matrix& c, const Matrix& d,
                                         double equilibrium_tol = 1e-9);

/// Decoupled subsystem i: a = Df(s) - sigma * lambda_i * Gamma.
struct ModalSystem {
  Index index = 0;
  double lambda = 0.0;
  double sigma = 0.0;
  Matrix a;
  Matrix b;
  Matrix c;
  Matrix d;
  Matrix gamma;
};

/// One subsystem per eigenvalue of the coupling, ascending in lambda.
std::vector<ModalSystem> modal_decompose(const LinearizedNetwork& lin,
                                         const OuterCoupling& coupling);

/// (U (x) I_n) blockdiag(a_i) (U^T (x) I_n); reproduces A_c.
Matrix recombine_modes(const std::vector<ModalSystem>& modes,
                       const OuterCoupling& coupling);

/// Modal initial conditions omega_i0, i.e. the blocks of (U^T (x) I_n) eta0.
std::vector<Vector> modal_inputs(const Vector& eta0,
                                 const OuterCoupling& coupling);

struct ModeStability {
  Index index = 0;
  double lambda = 0.0;
  double abscissa = 0.0;
  bool stable = false;
};

struct StabilityReport {
  std::vector<ModeStability> modes;
  bool stable = false;
};

/// Spectral abscissa of Df(s) - sigma * lambda_i * Gamma for every mode.
StabilityReport sync_stability(const Network& net, const Equilibrium& s,
                               double margin = kStabilityMargin);

}  // namespace netsync
