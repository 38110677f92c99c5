#include "netsync/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/Jacobi>
#include <Eigen/SVD>

#include "netsync/error.hpp"

namespace netsync {

namespace {

// Jacobi is quadratic per sweep in rotations and cubic overall; beyond this
// size the tridiagonal QR path is used instead.
constexpr Index kJacobiMaxSize = 256;

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    std::ostringstream msg;
    msg << what << ": expected a non-empty square matrix, got " << a.rows()
        << "x" << a.cols();
    throw InvalidArgument(msg.str());
  }
}

// Lexicographic comparison of two columns, larger first.
bool lex_greater(const Vector& a, const Vector& b, double tol) {
  for (Index k = 0; k < a.size(); ++k) {
    if (a[k] > b[k] + tol) return true;
    if (a[k] < b[k] - tol) return false;
  }
  return false;
}

SymEig canonicalize(SymEig raw) {
  const Index n = raw.eigenvalues.size();
  for (Index j = 0; j < n; ++j) {
    auto col = raw.eigenvectors.col(j);
    const double scale = col.cwiseAbs().maxCoeff();
    for (Index k = 0; k < n; ++k) {
      if (std::abs(col[k]) > 1e-10 * scale) {
        if (col[k] < 0) col = -col;
        break;
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return raw.eigenvalues[a] < raw.eigenvalues[b];
  });

  const double spread =
      n > 0 ? 1.0 + raw.eigenvalues.cwiseAbs().maxCoeff() : 1.0;
  const double cluster_tol = 1e-8 * spread;
  std::size_t begin = 0;
  while (begin < order.size()) {
    std::size_t end = begin + 1;
    while (end < order.size() &&
           raw.eigenvalues[order[end]] - raw.eigenvalues[order[begin]] <=
               cluster_tol) {
      ++end;
    }
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(begin),
                     order.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](Index a, Index b) {
                       return lex_greater(raw.eigenvectors.col(a),
                                          raw.eigenvectors.col(b), 1e-12);
                     });
    begin = end;
  }

  SymEig out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    out.eigenvalues[j] = raw.eigenvalues[order[static_cast<std::size_t>(j)]];
    out.eigenvectors.col(j) =
        raw.eigenvectors.col(order[static_cast<std::size_t>(j)]);
  }
  return out;
}

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix identity(Index n) { return Matrix::Identity(n, n); }

Matrix block_diagonal(const std::vector<Matrix>& blocks) {
  Index rows = 0;
  Index cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Index r = 0;
  Index c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

double symmetry_defect(const Matrix& s) {
  if (s.rows() != s.cols()) return std::numeric_limits<double>::infinity();
  return (s - s.transpose()).norm();
}

bool is_symmetric(const Matrix& s, double rel_tol) {
  if (s.rows() != s.cols()) return false;
  return symmetry_defect(s) <= rel_tol * s.norm() + 1e-300;
}

SymEig sym_eig_jacobi(const Matrix& s, int max_sweeps) {
  require_square(s, "sym_eig_jacobi");
  const Index n = s.rows();
  Matrix a = 0.5 * (s + s.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double total = a.norm();
  const double eps = std::numeric_limits<double>::epsilon();

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Index q = 1; q < n; ++q) {
      for (Index p = 0; p < q; ++p) off += a(p, q) * a(p, q);
    }
    if (std::sqrt(2.0 * off) <= eps * total) break;

    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) <= eps * eps * total) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        Eigen::JacobiRotation<double> rot;
        if (rot.makeJacobi(a, p, q)) {
          a.applyOnTheLeft(p, q, rot.adjoint());
          a.applyOnTheRight(p, q, rot);
          v.applyOnTheRight(p, q, rot);
          a(p, q) = a(q, p) = 0.0;
        }
      }
    }
  }
  if (sweep == max_sweeps) {
    std::ostringstream msg;
    msg << "sym_eig_jacobi: no convergence after " << max_sweeps << " sweeps";
    throw NumericalError(msg.str());
  }
  return SymEig{a.diagonal(), v};
}

SymEig sym_eig(const Matrix& s, double symmetry_tol) {
  require_square(s, "sym_eig");
  const double defect = symmetry_defect(s);
  if (defect > symmetry_tol * s.norm()) {
    std::ostringstream msg;
    msg << "sym_eig: matrix is not symmetric (||S - S^T||_F = " << defect
        << ", ||S||_F = " << s.norm() << ")";
    throw InvalidArgument(msg.str());
  }
  if (s.rows() <= kJacobiMaxSize) return canonicalize(sym_eig_jacobi(s));

  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (s + s.transpose()));
  if (solver.info() != Eigen::Success) {
    throw NumericalError("sym_eig: tridiagonal QR did not converge");
  }
  return canonicalize(SymEig{solver.eigenvalues(), solver.eigenvectors()});
}

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
  require_square(a, "eigenvalues");
  Eigen::EigenSolver<Matrix> solver;
  solver.compute(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigenvalues: shifted QR iteration did not converge within "
        << solver.getMaxIterations() * a.rows() << " iterations";
    throw NumericalError(msg.str());
  }
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double spectral_abscissa(const Matrix& a) {
  const auto ev = eigenvalues(a);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& z : ev) best = std::max(best, z.real());
  return best;
}

bool is_stable(const Matrix& a, double margin) {
  return spectral_abscissa(a) < -margin;
}

Matrix solve_linear(const Matrix& a, const Matrix& b) {
  require_square(a, "solve_linear");
  if (b.rows() != a.rows()) {
    throw InvalidArgument("solve_linear: right-hand side has " +
                          std::to_string(b.rows()) + " rows, expected " +
                          std::to_string(a.rows()));
  }
  Eigen::PartialPivLU<Matrix> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > 10 * std::numeric_limits<double>::epsilon())) {
    std::ostringstream msg;
    msg << "solve_linear: matrix is singular to working precision (rcond ~ "
        << rcond << ")";
    throw SingularMatrixError(msg.str(), rcond);
  }
  return lu.solve(b);
}

Index numerical_rank(const ComplexMatrix& m, double rel_threshold) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  Index rank = 0;
  for (Index k = 0; k < sv.size(); ++k) {
    if (sv[k] > rel_threshold * sv[0]) ++rank;
  }
  return rank;
}

}  // namespace netsync
