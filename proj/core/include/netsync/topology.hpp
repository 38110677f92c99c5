#pragma once

// Outer coupling matrices for diffusively coupled networks.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "netsync/matrix.hpp"

namespace netsync {

enum class TopologyKind { Ring, Star, Global, Custom };

std::string_view to_string(TopologyKind kind);
/// Accepts "ring" (alias "nearest-neighbor"), "star", "global", "custom".
TopologyKind parse_topology_kind(std::string_view name);

/// Undirected weighted edge between zero-based nodes i and j.
struct Edge {
  Index i = 0;
  Index j = 0;
  double weight = 1.0;
};

/// An N x N outer coupling matrix plus its cached spectrum.
///
/// The spectrum is computed on construction when the matrix is symmetric;
/// non-symmetric matrices are accepted (for full-matrix paths) but modal
/// paths reject them through spectrum().
class OuterCoupling {
 public:
  static OuterCoupling from_matrix(Matrix m,
                                   TopologyKind kind = TopologyKind::Custom,
                                   int k_neighbors = 0);

  Index size() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  TopologyKind kind() const { return kind_; }
  int k_neighbors() const { return k_neighbors_; }
  bool symmetric() const { return spectrum_.has_value(); }

  /// Throws InvalidArgument when the matrix is not symmetric.
  const SymEig& spectrum() const;
  const Vector& eigenvalues() const { return spectrum().eigenvalues; }
  const Matrix& eigenvectors() const { return spectrum().eigenvectors; }

 private:
  OuterCoupling() = default;

  Matrix matrix_;
  TopologyKind kind_ = TopologyKind::Custom;
  int k_neighbors_ = 0;
  std::optional<SymEig> spectrum_;
};

/// Ring with k neighbours per side, star with node 0 as hub, or all-to-all.
OuterCoupling build_topology(TopologyKind kind, Index n_nodes,
                             int k_neighbors = 1);

/// Laplacian of an undirected weighted graph. Self-loops, duplicate edges,
/// out-of-range nodes and non-positive weights are rejected.
OuterCoupling custom_topology(std::span<const Edge> edges, Index n_nodes);

struct ValidationReport {
  bool square = false;
  bool symmetric = false;
  bool nonpositive_off_diagonal = false;
  bool zero_row_sums = false;
  bool irreducible = false;
  /// Simple zero eigenvalue and every other eigenvalue positive.
  bool spectral = false;
  Index zero_eigenvalue_multiplicity = 0;
  double symmetry_defect = 0.0;
  double max_abs_row_sum = 0.0;
  std::optional<double> algebraic_connectivity;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

/// Checks that m is symmetric, diffusive and irreducible with a
/// non-positive off-diagonal sign pattern.
ValidationReport validate_assumption1(const Matrix& m);

}  // namespace netsync
