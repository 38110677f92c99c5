#pragma once

// Dense real matrix kernel shared by every other module.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace netsync {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Tolerances used throughout; all relative with an absolute floor.
struct Tolerances {
  double stability_margin = 1e-9;
  double symmetry = 1e-10;
  double absolute_floor = 1e-12;
  double rank_threshold = 1e-8;
};

inline constexpr double kStabilityMargin = 1e-9;

/// Kronecker product; block (i, j) of the result is a(i, j) * b.
Matrix kron(const Matrix& a, const Matrix& b);

Matrix identity(Index n);

Matrix block_diagonal(const std::vector<Matrix>& blocks);

/// Frobenius norm of s - s^T.
double symmetry_defect(const Matrix& s);

bool is_symmetric(const Matrix& s, double rel_tol = 1e-10);

/// Eigendecomposition of a symmetric matrix: s = U diag(eigenvalues) U^T.
struct SymEig {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // orthogonal, column i pairs with eigenvalues[i]
};

/// Symmetric eigendecomposition with deterministic column order and signs.
///
/// Eigenvalues are ascending; within a cluster of equal eigenvalues the
/// columns are ordered lexicographically (descending), and every column is
/// scaled so that its first non-negligible component is positive. Throws
/// InvalidArgument when ||s - s^T||_F exceeds symmetry_tol * ||s||_F.
SymEig sym_eig(const Matrix& s, double symmetry_tol = 1e-10);

/// Cyclic Jacobi rotations, raw (unsorted) output. Exposed for testing.
SymEig sym_eig_jacobi(const Matrix& s, int max_sweeps = 100);

/// All eigenvalues of a general real square matrix.
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

/// Largest real part over the eigenvalues of a.
double spectral_abscissa(const Matrix& a);

/// Hurwitz test: spectral_abscissa(a) < -margin.
bool is_stable(const Matrix& a, double margin = kStabilityMargin);

/// Solves a * x = b. Throws SingularMatrixError when a is singular to
/// working precision.
Matrix solve_linear(const Matrix& a, const Matrix& b);

/// Number of singular values above rel_threshold * sigma_max.
Index numerical_rank(const ComplexMatrix& m, double rel_threshold = 1e-8);

}  // namespace netsync
