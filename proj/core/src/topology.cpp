#include "netsync/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>
#include <utility>

#include "netsync/error.hpp"

namespace netsync {

std::string_view to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::Ring: return "ring";
    case TopologyKind::Star: return "star";
    case TopologyKind::Global: return "global";
    case TopologyKind::Custom: return "custom";
  }
  return "custom";
}

TopologyKind parse_topology_kind(std::string_view name) {
  if (name == "ring" || name == "nearest-neighbor") return TopologyKind::Ring;
  if (name == "star") return TopologyKind::Star;
  if (name == "global") return TopologyKind::Global;
  if (name == "custom") return TopologyKind::Custom;
  throw InvalidArgument("unknown topology kind '" + std::string(name) +
                        "' (expected ring, star, global or custom)");
}

OuterCoupling OuterCoupling::from_matrix(Matrix m, TopologyKind kind,
                                         int k_neighbors) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument("coupling matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw InvalidArgument("coupling matrix has non-finite entries");
  }
  OuterCoupling out;
  out.kind_ = kind;
  out.k_neighbors_ = k_neighbors;
  if (is_symmetric(m)) {
    m = (0.5 * (m + m.transpose())).eval();
    out.spectrum_ = sym_eig(m);
  }
  out.matrix_ = std::move(m);
  return out;
}

const SymEig& OuterCoupling::spectrum() const {
  if (!spectrum_) {
    std::ostringstream msg;
    msg << "outer coupling matrix is not symmetric (||M - M^T||_F = "
        << symmetry_defect(matrix_)
        << "); modal decomposition requires a symmetric M";
    throw InvalidArgument(msg.str());
  }
  return *spectrum_;
}

OuterCoupling build_topology(TopologyKind kind, Index n, int k) {
  if (n < 2) {
    throw InvalidArgument("topology needs at least 2 nodes, got " +
                          std::to_string(n));
  }
  Matrix m = Matrix::Zero(n, n);
  switch (kind) {
    case TopologyKind::Ring: {
      if (k < 1 || 2 * static_cast<Index>(k) > n - 1) {
        throw InvalidArgument("ring(k) requires 1 <= k <= (N-1)/2; got k=" +
                              std::to_string(k) + ", N=" + std::to_string(n));
      }
      for (Index i = 0; i < n; ++i) {
        for (int d = 1; d <= k; ++d) {
          m(i, (i + d) % n) = -1.0;
          m(i, (i - d + n) % n) = -1.0;
        }
      }
      break;
    }
    case TopologyKind::Star:
      for (Index i = 1; i < n; ++i) m(0, i) = m(i, 0) = -1.0;
      k = 0;
      break;
    case TopologyKind::Global:
      m.setConstant(-1.0);
      k = 0;
      break;
    case TopologyKind::Custom:
      throw InvalidArgument("build_topology: use custom_topology for edges");
  }
  m.diagonal().setZero();
  m.diagonal() = -m.rowwise().sum();
  return OuterCoupling::from_matrix(std::move(m), kind, k);
}

OuterCoupling custom_topology(std::span<const Edge> edges, Index n) {
  if (n < 2) {
    throw InvalidArgument("topology needs at least 2 nodes, got " +
                          std::to_string(n));
  }
  Matrix m = Matrix::Zero(n, n);
  std::set<std::pair<Index, Index>> seen;
  for (const Edge& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) {
      throw InvalidArgument("edge (" + std::to_string(e.i) + "," +
                            std::to_string(e.j) + ") out of range for N=" +
                            std::to_string(n));
    }
    if (e.i == e.j) {
      throw InvalidArgument("self-loop at node " + std::to_string(e.i));
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw InvalidArgument("edge weights must be positive and finite");
    }
    const auto key = std::minmax(e.i, e.j);
    if (!seen.insert(key).second) {
      throw InvalidArgument("duplicate edge (" + std::to_string(key.first) +
                            "," + std::to_string(key.second) + ")");
    }
    m(e.i, e.j) = m(e.j, e.i) = -e.weight;
  }
  m.diagonal() = -m.rowwise().sum();
  return OuterCoupling::from_matrix(std::move(m), TopologyKind::Custom, 0);
}

ValidationReport validate_assumption1(const Matrix& m) {
  ValidationReport r;
  r.square = m.rows() == m.cols() && m.rows() > 0;
  if (!r.square) {
    r.failures.emplace_back("matrix is not square");
    return r;
  }
  const Index n = m.rows();
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  const double zero_tol = 1e-12 * scale;

  r.symmetry_defect = symmetry_defect(m);
  r.symmetric = r.symmetry_defect <= 1e-10 * m.norm();
  if (!r.symmetric) r.failures.emplace_back("matrix is not symmetric");

  r.nonpositive_off_diagonal = true;
  for (Index i = 0; i < n && r.nonpositive_off_diagonal; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j && m(i, j) > zero_tol) {
        r.nonpositive_off_diagonal = false;
        break;
      }
    }
  }
  if (!r.nonpositive_off_diagonal) {
    r.failures.emplace_back("positive off-diagonal entry");
  }

  r.max_abs_row_sum = m.rowwise().sum().cwiseAbs().maxCoeff();
  r.zero_row_sums = r.max_abs_row_sum <= 1e-10 * scale * n;
  if (!r.zero_row_sums) r.failures.emplace_back("row sums are not zero");

  // Connectivity of the off-diagonal support graph.
  std::vector<bool> visited(static_cast<std::size_t>(n), false);
  std::deque<Index> queue{0};
  visited[0] = true;
  Index reached = 1;
  while (!queue.empty()) {
    const Index i = queue.front();
    queue.pop_front();
    for (Index j = 0; j < n; ++j) {
      const bool linked =
          std::abs(m(i, j)) > zero_tol || std::abs(m(j, i)) > zero_tol;
      if (j != i && linked && !visited[static_cast<std::size_t>(j)]) {
        visited[static_cast<std::size_t>(j)] = true;
        ++reached;
        queue.push_back(j);
      }
    }
  }
  r.irreducible = reached == n;
  if (!r.irreducible) r.failures.emplace_back("matrix is reducible");

  if (r.symmetric) {
    const SymEig eig = sym_eig(m);
    const double lambda_max = eig.eigenvalues.cwiseAbs().maxCoeff();
    const double cluster_tol = 1e-8 * (1.0 + lambda_max);
    bool any_negative = false;
    for (Index k = 0; k < n; ++k) {
      const double lam = eig.eigenvalues[k];
      if (std::abs(lam) <= cluster_tol) {
        ++r.zero_eigenvalue_multiplicity;
      } else if (lam < 0) {
        any_negative = true;
      }
    }
    if (n > 1) r.algebraic_connectivity = eig.eigenvalues[1];
    r.spectral = r.zero_eigenvalue_multiplicity == 1 && !any_negative;
    if (!r.spectral) {
      r.failures.emplace_back(
          "zero eigenvalue multiplicity " +
          std::to_string(r.zero_eigenvalue_multiplicity) +
          (any_negative ? " with negative eigenvalues" : ""));
    }
  } else {
    r.failures.emplace_back("spectral facts not checked (non-symmetric)");
  }
  return r;
}

}  // namespace netsync
